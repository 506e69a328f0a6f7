#include "qgdg/bp.hpp"

#include <algorithm>
#include <cmath>

namespace qgdg {

TannerGraph::TannerGraph(const SparseBitMatrix& h) {
    const std::size_t m = h.n_rows();
    const std::size_t n = h.n_cols();
    cn_begin_.reserve(m + 1);
    cn_begin_.push_back(0);
    edge_vn_.reserve(h.nnz());
    edge_cn_.reserve(h.nnz());
    for (std::size_t j = 0; j < m; ++j) {
        for (Index i : h.row(j)) {
            edge_vn_.push_back(i);
            edge_cn_.push_back(static_cast<Index>(j));
        }
        cn_begin_.push_back(static_cast<std::uint32_t>(edge_vn_.size()));
    }
    vn_begin_.assign(n + 1, 0);
    for (Index i : edge_vn_) {
        ++vn_begin_[i + 1];
    }
    for (std::size_t i = 0; i < n; ++i) {
        vn_begin_[i + 1] += vn_begin_[i];
    }
    vn_edge_ids_.resize(edge_vn_.size());
    std::vector<std::uint32_t> fill(vn_begin_.begin(), vn_begin_.end() - 1);
    for (std::uint32_t e = 0; e < edge_vn_.size(); ++e) {
        vn_edge_ids_[fill[edge_vn_[e]]++] = e;
    }
}

PathMetric path_metric(const SparseBitMatrix& h, std::span<const double> llrs, std::span<const std::uint8_t> syndrome,
                       std::span<const std::uint8_t> estimate) {
    if (estimate.size() != h.n_cols() || syndrome.size() != h.n_rows() || llrs.size() != h.n_cols()) {
        throw ContractError("path_metric: dimension mismatch");
    }
    Bits s = matvec(h, estimate);
    if (!std::equal(s.begin(), s.end(), syndrome.begin())) {
        return PathMetric::infinite();
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < estimate.size(); ++i) {
        if (estimate[i]) {
            sum += llrs[i];
        }
    }
    return PathMetric::finite(sum);
}

BpState::BpState(const TannerGraph& graph, std::span<const double> llrs, std::span<const std::uint8_t> syndrome,
                 BpConfig config)
    : graph_(&graph), llrs_(llrs.begin(), llrs.end()), config_(config), syndrome_(syndrome.begin(), syndrome.end()) {
    if (llrs_.size() != graph.n_vars() || syndrome_.size() != graph.n_checks()) {
        throw ContractError("BpState: dimension mismatch");
    }
    for (double l : llrs_) {
        if (!std::isfinite(l)) {
            throw ContractError("BpState: prior LLRs must be finite");
        }
    }
    for (auto& b : syndrome_) {
        b &= 1U;
    }
    working_ = syndrome_;
    status_.assign(graph.n_vars(), VnStatus::Undecided);
    cn_active_.resize(graph.n_checks());
    for (std::size_t j = 0; j < graph.n_checks(); ++j) {
        cn_active_[j] = static_cast<std::uint32_t>(graph.cn_degree(j));
    }
    v2c_.resize(graph.n_edges());
    c2v_.resize(graph.n_edges());
    posterior_.resize(graph.n_vars());
    history_.resize(graph.n_vars() * kHistoryLength);
    reinit_messages();
}

void BpState::reinit_messages() {
    for (std::size_t e = 0; e < v2c_.size(); ++e) {
        v2c_[e] = std::clamp(llrs_[graph_->edge_vn(e)], -config_.clip, config_.clip);
    }
    std::fill(c2v_.begin(), c2v_.end(), 0.0);
    std::copy(llrs_.begin(), llrs_.end(), posterior_.begin());
    std::fill(history_.begin(), history_.end(), 0.0);
    t_ = 0;
}

void BpState::cn_update() {
    const TannerGraph& g = *graph_;
    const double clip_msg = config_.scale * config_.clip;
    for (std::size_t j = 0; j < g.n_checks(); ++j) {
        const std::uint32_t active = cn_active_[j];
        if (active == 0) {
            continue;
        }
        const std::uint32_t begin = g.cn_begin(j);
        const std::uint32_t end = g.cn_end(j);
        const bool flip = working_[j] != 0;
        if (active == 1) {
            for (std::uint32_t e = begin; e < end; ++e) {
                if (status_[g.edge_vn(e)] == VnStatus::Undecided) {
                    c2v_[e] = flip ? -clip_msg : clip_msg;
                    break;
                }
            }
            continue;
        }
        double min1 = std::numeric_limits<double>::infinity();
        double min2 = min1;
        std::uint32_t arg = end;
        bool negative = flip;
        for (std::uint32_t e = begin; e < end; ++e) {
            if (status_[g.edge_vn(e)] != VnStatus::Undecided) {
                continue;
            }
            const double m = v2c_[e];
            negative ^= (m < 0.0);
            const double a = std::fabs(m);
            if (a < min1) {
                min2 = min1;
                min1 = a;
                arg = e;
            } else if (a < min2) {
                min2 = a;
            }
        }
        for (std::uint32_t e = begin; e < end; ++e) {
            if (status_[g.edge_vn(e)] != VnStatus::Undecided) {
                continue;
            }
            const double mag = config_.scale * (e == arg ? min2 : min1);
            const bool neg = negative ^ (v2c_[e] < 0.0);
            c2v_[e] = neg ? -mag : mag;
        }
    }
}

void BpState::vn_update() {
    const TannerGraph& g = *graph_;
    const std::size_t slot = t_ % kHistoryLength;
    for (std::size_t i = 0; i < g.n_vars(); ++i) {
        if (status_[i] != VnStatus::Undecided) {
            continue;
        }
        auto edges = g.vn_edges(i);
        double post = llrs_[i];
        for (std::uint32_t e : edges) {
            post += c2v_[e];
        }
        posterior_[i] = post;
        for (std::uint32_t e : edges) {
            v2c_[e] = std::clamp(post - c2v_[e], -config_.clip, config_.clip);
        }
        history_[i * kHistoryLength + slot] = post;
    }
}

std::size_t BpState::iterate(std::size_t n, bool early_stop) {
    for (std::size_t it = 0; it < n; ++it) {
        cn_update();
        vn_update();
        ++t_;
        ++total_iterations_;
        if (early_stop && check_syndrome()) {
            return it + 1;
        }
    }
    return n;
}

bool BpState::hard_bit(std::size_t i) const {
    switch (status_[i]) {
        case VnStatus::Zero:
            return false;
        case VnStatus::One:
            return true;
        default:
            return posterior_[i] <= 0.0;
    }
}

Bits BpState::hard_decision() const {
    Bits out(n_vars());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = hard_bit(i) ? 1 : 0;
    }
    return out;
}

bool BpState::check_syndrome() const {
    const TannerGraph& g = *graph_;
    for (std::size_t j = 0; j < g.n_checks(); ++j) {
        std::uint8_t parity = working_[j];
        if (cn_active_[j] != 0) {
            for (std::uint32_t e = g.cn_begin(j); e < g.cn_end(j); ++e) {
                const Index v = g.edge_vn(e);
                if (status_[v] == VnStatus::Undecided && posterior_[v] <= 0.0) {
                    parity ^= 1U;
                }
            }
        }
        if (parity != 0) {
            return false;
        }
    }
    return true;
}

void BpState::decimate(std::size_t vn, bool value) {
    if (vn >= n_vars() || status_[vn] != VnStatus::Undecided) {
        throw ContractError("decimate: VN " + std::to_string(vn) + " is not undecided");
    }
    status_[vn] = value ? VnStatus::One : VnStatus::Zero;
    for (std::uint32_t e : graph_->vn_edges(vn)) {
        const Index j = graph_->edge_cn(e);
        --cn_active_[j];
        if (value) {
            working_[j] ^= 1U;
        }
    }
    if (value) {
        decided_llr_sum_ += llrs_[vn];
    }
    ++decisions_;
}

PeelResult BpState::peel() {
    const TannerGraph& g = *graph_;
    std::vector<Index> queue;
    for (std::size_t j = 0; j < g.n_checks(); ++j) {
        if (cn_active_[j] == 0 && working_[j] != 0) {
            return PeelResult::Contradiction;
        }
        if (cn_active_[j] == 1) {
            queue.push_back(static_cast<Index>(j));
        }
    }
    for (std::size_t q = 0; q < queue.size(); ++q) {
        const Index j = queue[q];
        if (cn_active_[j] != 1) {
            if (cn_active_[j] == 0 && working_[j] != 0) {
                return PeelResult::Contradiction;
            }
            continue;
        }
        Index v = 0;
        for (std::uint32_t e = g.cn_begin(j); e < g.cn_end(j); ++e) {
            if (status_[g.edge_vn(e)] == VnStatus::Undecided) {
                v = g.edge_vn(e);
                break;
            }
        }
        decimate(v, working_[j] != 0);
        for (std::uint32_t e : g.vn_edges(v)) {
            const Index k = g.edge_cn(e);
            if (cn_active_[k] == 0 && working_[k] != 0) {
                return PeelResult::Contradiction;
            }
            if (cn_active_[k] == 1) {
                queue.push_back(k);
            }
        }
    }
    return PeelResult::Ok;
}

Snapshot BpState::snapshot() const {
    return Snapshot{status_, working_, cn_active_, decided_llr_sum_, decisions_};
}

void BpState::restore(const Snapshot& s) {
    if (s.vn_status.size() != status_.size() || s.working_syndrome.size() != working_.size()) {
        throw ContractError("restore: snapshot shape mismatch");
    }
    status_ = s.vn_status;
    working_ = s.working_syndrome;
    cn_active_ = s.cn_active_degree;
    decided_llr_sum_ = s.decided_llr_sum;
    decisions_ = s.decisions;
    reinit_messages();
}

std::array<double, kHistoryLength> BpState::history(std::size_t i) const {
    if (t_ < kHistoryLength) {
        throw ContractError("history: fewer than four iterations since initialization");
    }
    std::array<double, kHistoryLength> out{};
    for (std::size_t k = 0; k < kHistoryLength; ++k) {
        out[k] = history_[i * kHistoryLength + (t_ + k) % kHistoryLength];
    }
    return out;
}

double BpState::history_sum(std::size_t i) const {
    double sum = 0.0;
    for (double v : history(i)) {
        sum += v;
    }
    return sum;
}

std::size_t BpState::unsatisfied_neighbors(std::size_t i) const {
    const TannerGraph& g = *graph_;
    std::size_t count = 0;
    for (std::uint32_t e : g.vn_edges(i)) {
        const Index j = g.edge_cn(e);
        if (cn_active_[j] == 0) {
            continue;
        }
        std::uint8_t parity = working_[j];
        for (std::uint32_t f = g.cn_begin(j); f < g.cn_end(j); ++f) {
            const Index v = g.edge_vn(f);
            if (status_[v] == VnStatus::Undecided && posterior_[v] <= 0.0) {
                parity ^= 1U;
            }
        }
        count += parity;
    }
    return count;
}

}  // namespace qgdg
