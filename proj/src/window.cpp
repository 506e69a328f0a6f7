#include "qgdg/window.hpp"

#include <algorithm>
#include <chrono>
#include <map>

namespace qgdg {

std::string decoder_name(DecoderKind kind) {
    switch (kind) {
        case DecoderKind::Gdg:
            return "gdg";
        case DecoderKind::Osd0:
            return "osd0";
        case DecoderKind::OsdCs:
            return "osd-cs";
    }
    return {};
}

DecoderKind parse_decoder_kind(const std::string& name) {
    if (name == "gdg") {
        return DecoderKind::Gdg;
    }
    if (name == "osd0") {
        return DecoderKind::Osd0;
    }
    if (name == "osd-cs") {
        return DecoderKind::OsdCs;
    }
    throw ContractError("unknown decoder '" + name + "' (expected gdg, osd0 or osd-cs)");
}

InnerResult decode_inner(const SparseBitMatrix& h, std::span<const double> llrs, std::span<const std::uint8_t> s,
                         const InnerDecoder& decoder) {
    InnerResult out;
    if (decoder.kind == DecoderKind::Gdg) {
        GdgResult r = gdg_decode(h, llrs, s, decoder.gdg);
        out.success = r.success;
        out.estimate = std::move(r.estimate);
        out.pm = r.pm;
        out.iterations = r.total_iterations;
        return out;
    }
    OsdConfig cfg = decoder.osd;
    cfg.method = decoder.kind == DecoderKind::Osd0 ? OsdMethod::Osd0 : OsdMethod::OsdCs;
    BpOsdResult r = bp_osd_decode(h, llrs, s, cfg);
    out.success = r.success;
    out.estimate = std::move(r.estimate);
    out.pm = r.pm;
    out.iterations = r.bp_iterations;
    return out;
}

WindowView window_view(const DetectorModel& model, std::size_t start_block, std::size_t end_block, std::size_t step,
                       bool commit_all, bool merge_tail) {
    if (!model.blocks()) {
        throw ContractError("window_view: model has no round blocks");
    }
    if (start_block >= end_block || end_block > model.n_blocks()) {
        throw ContractError("window_view: block range [" + std::to_string(start_block) + ", " +
                            std::to_string(end_block) + ") outside the model");
    }
    const std::size_t w = model.detectors_per_block();
    WindowView v;
    v.start_block = start_block;
    v.end_block = end_block;
    v.first_row = start_block * w;
    const std::size_t row_end = end_block * w;
    const bool do_merge = merge_tail && !commit_all;

    std::vector<std::vector<Index>> cols;
    std::map<Index, double> merged;
    const auto& spans = model.column_spans();
    for (std::size_t c = 0; c < model.n_faults(); ++c) {
        const std::size_t first = spans[c].first;
        if (first < start_block || first >= end_block) {
            continue;
        }
        std::vector<Index> rows;
        for (Index r : model.h().col(c)) {
            if (r >= v.first_row && r < row_end) {
                rows.push_back(static_cast<Index>(r - v.first_row));
            }
        }
        if (do_merge && first == end_block - 1 && rows.size() == 1) {
            auto [it, inserted] = merged.try_emplace(rows.front(), model.priors()[c]);
            if (!inserted) {
                it->second = clamp_prior(combine_priors(it->second, model.priors()[c]));
            }
            continue;
        }
        cols.push_back(std::move(rows));
        v.columns.push_back(static_cast<Index>(c));
        v.priors.push_back(model.priors()[c]);
        if (commit_all || first < start_block + step) {
            v.commit_columns.push_back(static_cast<Index>(c));
        }
    }
    for (const auto& [row, p] : merged) {
        cols.push_back({row});
        v.columns.push_back(kNoColumn);
        v.priors.push_back(p);
    }
    v.h = SparseBitMatrix::from_columns(row_end - v.first_row, cols);
    return v;
}

std::vector<std::pair<std::size_t, std::size_t>> window_ranges(std::size_t blocks, std::size_t window,
                                                               std::size_t step) {
    if (window == 0 || step == 0 || (step >= window && window < blocks)) {
        throw ContractError("window plan requires 1 <= F < W");
    }
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t start = 0;
    while (start + window < blocks) {
        out.emplace_back(start, start + window);
        start += step;
    }
    out.emplace_back(start, blocks);
    return out;
}

SlidingResult sliding_decode(const DetectorModel& model, std::span<const std::uint8_t> syndrome,
                             const WindowPlan& plan) {
    if (syndrome.size() != model.n_detectors()) {
        throw ContractError("sliding_decode: syndrome length mismatch");
    }
    const auto ranges = window_ranges(model.n_blocks(), plan.window, plan.step);
    Bits residual(syndrome.begin(), syndrome.end());
    SlidingResult out;
    out.estimate.assign(model.n_faults(), 0);
    for (std::size_t k = 0; k < ranges.size(); ++k) {
        const bool last = k + 1 == ranges.size();
        const auto [start, end] = ranges[k];
        WindowView view = window_view(model, start, end, plan.step, last, plan.merge_tail);
        Bits s_win(residual.begin() + static_cast<std::ptrdiff_t>(view.first_row),
                   residual.begin() + static_cast<std::ptrdiff_t>(view.first_row + view.h.n_rows()));
        std::vector<double> llrs;
        llrs.reserve(view.priors.size());
        for (double p : view.priors) {
            llrs.push_back(prior_to_llr(p));
        }
        const InnerDecoder& dec = (last && plan.last_window_override) ? *plan.last_window_override : plan.inner;
        const auto t0 = std::chrono::steady_clock::now();
        InnerResult r = decode_inner(view.h, llrs, s_win, dec);
        const auto t1 = std::chrono::steady_clock::now();

        WindowDiagnostics d;
        d.start_block = start;
        d.end_block = end;
        d.rows = view.h.n_rows();
        d.cols = view.h.n_cols();
        d.success = r.success;
        d.pm = r.pm;
        d.iterations = r.iterations;
        d.elapsed_us = std::chrono::duration<double, std::micro>(t1 - t0).count();
        if (r.success) {
            std::vector<std::uint8_t> commit(model.n_faults(), 0);
            for (Index c : view.commit_columns) {
                commit[c] = 1;
            }
            for (std::size_t j = 0; j < view.columns.size(); ++j) {
                const Index c = view.columns[j];
                if (c == kNoColumn || !commit[c] || !r.estimate[j]) {
                    continue;
                }
                out.estimate[c] = 1;
                ++d.committed_ones;
                for (Index row : model.h().col(c)) {
                    residual[row] ^= 1U;
                }
            }
        } else {
            out.all_windows_success = false;
        }
        out.windows.push_back(d);
    }
    return out;
}

std::string outcome_name(Outcome o) {
    switch (o) {
        case Outcome::Success:
            return "success";
        case Outcome::SyndromeFailure:
            return "syndrome_failure";
        case Outcome::LogicalFailure:
            return "logical_failure";
    }
    return {};
}

Outcome judge(const DetectorModel& model, std::span<const std::uint8_t> estimate, const FaultSample& sample) {
    const Bits s = matvec(model.h(), estimate);
    if (s != sample.detectors.to_dense()) {
        return Outcome::SyndromeFailure;
    }
    const Bits l = matvec(model.observables(), estimate);
    if (l != sample.observables.to_dense()) {
        return Outcome::LogicalFailure;
    }
    return Outcome::Success;
}

}  // namespace qgdg
