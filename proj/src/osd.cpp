#include "qgdg/osd.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

namespace qgdg {

std::vector<Index> rank_columns(std::span<const double> scores) {
    std::vector<Index> order(scores.size());
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return scores[a] < scores[b]; });
    return order;
}

std::vector<double> ranking_scores(const BpState& state, bool latest_only) {
    std::vector<double> scores(state.n_vars());
    const bool use_history = !latest_only && state.history_size() == kHistoryLength;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        scores[i] = use_history ? state.history_sum(i) : state.posteriors()[i];
    }
    return scores;
}

namespace {

using Words = std::vector<std::uint64_t>;

void xor_into(Words& dst, const Words& src) {
    for (std::size_t w = 0; w < dst.size(); ++w) {
        dst[w] ^= src[w];
    }
}

double pivot_cost(const Words& bits, std::size_t rank, const std::vector<Index>& pivots, std::span<const double> llrs) {
    double sum = 0.0;
    for (std::size_t w = 0; w < bits.size(); ++w) {
        std::uint64_t word = bits[w];
        while (word != 0) {
            const std::size_t r = w * 64 + static_cast<std::size_t>(std::countr_zero(word));
            word &= word - 1;
            if (r < rank) {
                sum += llrs[pivots[r]];
            }
        }
    }
    return sum;
}

/// T*s restricted to the first `rank` rows, or nullopt when s is outside the span.
std::optional<Words> reduced_syndrome(const Elimination& e, std::span<const std::uint8_t> s) {
    Words ts = e.transformed(s);
    const std::size_t rank = e.rank();
    for (std::size_t r = rank; r < e.n_rows; ++r) {
        if ((ts[r / 64] >> (r % 64)) & 1U) {
            return std::nullopt;
        }
    }
    for (std::size_t r = rank; r < ts.size() * 64; ++r) {
        ts[r / 64] &= ~(std::uint64_t{1} << (r % 64));
    }
    return ts;
}

Words reduced_column(const Elimination& e, Index c, std::size_t n_words) {
    Words col(n_words, 0);
    for (std::size_t r = 0; r < e.rank(); ++r) {
        if (e.reduced.test(r, c)) {
            col[r / 64] |= std::uint64_t{1} << (r % 64);
        }
    }
    return col;
}

Bits assemble(std::size_t n, const Elimination& e, const Words& pivot_bits, std::span<const Index> flipped) {
    Bits x(n, 0);
    for (std::size_t r = 0; r < e.rank(); ++r) {
        if ((pivot_bits[r / 64] >> (r % 64)) & 1U) {
            x[e.pivot_columns[r]] = 1;
        }
    }
    for (Index c : flipped) {
        x[c] = 1;
    }
    return x;
}

}  // namespace

std::optional<OsdResult> osd0(const SparseBitMatrix& h, std::span<const std::uint8_t> s,
                              std::span<const Index> column_order, std::span<const double> llrs) {
    return osd_cs(h, s, column_order, llrs, 0, std::size_t{0});
}

std::optional<OsdResult> osd_cs(const SparseBitMatrix& h, std::span<const std::uint8_t> s,
                                std::span<const Index> column_order, std::span<const double> llrs, std::size_t order,
                                std::optional<std::size_t> restrict_to) {
    if (s.size() != h.n_rows() || llrs.size() != h.n_cols() || column_order.size() != h.n_cols()) {
        throw ContractError("osd: dimension mismatch");
    }
    const Elimination e = row_reduce(h, column_order);
    auto ts = reduced_syndrome(e, s);
    if (!ts) {
        return std::nullopt;
    }
    const std::size_t rank = e.rank();
    const std::size_t n_words = ts->size();

    double best = pivot_cost(*ts, rank, e.pivot_columns, llrs);
    std::vector<Index> best_flips;

    std::vector<bool> is_pivot(h.n_cols(), false);
    for (Index p : e.pivot_columns) {
        is_pivot[p] = true;
    }
    const std::size_t limit = std::min(restrict_to.value_or(column_order.size()), column_order.size());
    std::vector<Index> candidates;
    for (std::size_t pos = 0; pos < limit; ++pos) {
        if (!is_pivot[column_order[pos]]) {
            candidates.push_back(column_order[pos]);
        }
    }

    std::vector<Words> columns;
    columns.reserve(candidates.size());
    for (Index c : candidates) {
        columns.push_back(reduced_column(e, c, n_words));
    }

    Words work(n_words);
    for (std::size_t a = 0; a < candidates.size(); ++a) {
        work = *ts;
        xor_into(work, columns[a]);
        const double pm = pivot_cost(work, rank, e.pivot_columns, llrs) + llrs[candidates[a]];
        if (pm < best) {
            best = pm;
            best_flips = {candidates[a]};
        }
    }
    const std::size_t pair_span = std::min(order, candidates.size());
    for (std::size_t a = 0; a < pair_span; ++a) {
        for (std::size_t b = a + 1; b < pair_span; ++b) {
            work = *ts;
            xor_into(work, columns[a]);
            xor_into(work, columns[b]);
            const double pm =
                pivot_cost(work, rank, e.pivot_columns, llrs) + llrs[candidates[a]] + llrs[candidates[b]];
            if (pm < best) {
                best = pm;
                best_flips = {candidates[a], candidates[b]};
            }
        }
    }

    Words pivots = *ts;
    for (Index c : best_flips) {
        xor_into(pivots, columns[static_cast<std::size_t>(
                             std::find(candidates.begin(), candidates.end(), c) - candidates.begin())]);
    }
    OsdResult result;
    result.estimate = assemble(h.n_cols(), e, pivots, best_flips);
    result.pm = PathMetric::finite(best);
    return result;
}

BpOsdResult bp_osd_decode(const SparseBitMatrix& h, std::span<const double> llrs, std::span<const std::uint8_t> s,
                          const OsdConfig& config) {
    TannerGraph graph(h);
    BpState state(graph, llrs, s, BpConfig{config.scale, kDefaultClip});
    BpOsdResult out;
    if (state.check_syndrome()) {
        out.bp_converged = true;
    } else {
        out.bp_iterations = state.iterate(config.bp_iterations, true);
        out.bp_converged = state.check_syndrome();
    }
    if (out.bp_converged) {
        out.estimate = state.hard_decision();
        out.pm = path_metric(h, llrs, s, out.estimate);
        out.success = true;
        return out;
    }
    const auto order = rank_columns(ranking_scores(state, config.latest_posterior_ranking));
    std::optional<OsdResult> r;
    if (config.method == OsdMethod::Osd0) {
        r = osd0(h, s, order, llrs);
    } else {
        r = osd_cs(h, s, order, llrs, config.order, config.restrict_to);
    }
    if (!r) {
        out.estimate = state.hard_decision();
        out.pm = PathMetric::infinite();
        return out;
    }
    out.estimate = std::move(r->estimate);
    out.pm = r->pm;
    out.success = true;
    return out;
}

}  // namespace qgdg
