#pragma once

// Flooding min-sum belief propagation with decimation, peeling and path metrics.

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "qgdg/gf2.hpp"

namespace qgdg {

inline constexpr double kDefaultClip = 50.0;
inline constexpr std::size_t kHistoryLength = 4;

/// Edge-indexed Tanner graph. Edges are numbered row by row, so CN j owns the
/// contiguous range [cn_begin[j], cn_begin[j+1]).
class TannerGraph {
public:
    TannerGraph() = default;
    explicit TannerGraph(const SparseBitMatrix& h);

    [[nodiscard]] std::size_t n_checks() const { return cn_begin_.empty() ? 0 : cn_begin_.size() - 1; }
    [[nodiscard]] std::size_t n_vars() const { return vn_begin_.empty() ? 0 : vn_begin_.size() - 1; }
    [[nodiscard]] std::size_t n_edges() const { return edge_vn_.size(); }

    [[nodiscard]] std::uint32_t cn_begin(std::size_t j) const { return cn_begin_[j]; }
    [[nodiscard]] std::uint32_t cn_end(std::size_t j) const { return cn_begin_[j + 1]; }
    [[nodiscard]] Index edge_vn(std::size_t e) const { return edge_vn_[e]; }
    [[nodiscard]] Index edge_cn(std::size_t e) const { return edge_cn_[e]; }

    /// Edge ids incident to VN i, ascending by CN.
    [[nodiscard]] std::span<const std::uint32_t> vn_edges(std::size_t i) const {
        return {vn_edge_ids_.data() + vn_begin_[i], vn_begin_[i + 1] - vn_begin_[i]};
    }
    [[nodiscard]] std::size_t vn_degree(std::size_t i) const { return vn_begin_[i + 1] - vn_begin_[i]; }
    [[nodiscard]] std::size_t cn_degree(std::size_t j) const { return cn_begin_[j + 1] - cn_begin_[j]; }

private:
    std::vector<std::uint32_t> cn_begin_;
    std::vector<Index> edge_vn_;
    std::vector<Index> edge_cn_;
    std::vector<std::uint32_t> vn_begin_;
    std::vector<std::uint32_t> vn_edge_ids_;
};

struct BpConfig {
    double scale = 1.0;
    double clip = kDefaultClip;
};

enum class VnStatus : std::int8_t { Undecided = -1, Zero = 0, One = 1 };

/// Sum of prior LLRs over the ones of an estimate, or Infinite when it violates the syndrome.
class PathMetric {
public:
    PathMetric() = default;
    static PathMetric finite(double v) { return PathMetric(v); }
    static PathMetric infinite() { return {}; }

    [[nodiscard]] bool is_finite() const { return finite_; }
    [[nodiscard]] double value() const {
        return finite_ ? value_ : std::numeric_limits<double>::infinity();
    }
    bool operator<(const PathMetric& o) const { return value() < o.value(); }
    bool operator==(const PathMetric& o) const = default;

private:
    explicit PathMetric(double v) : value_(v), finite_(true) {}
    double value_ = 0.0;
    bool finite_ = false;
};

PathMetric path_metric(const SparseBitMatrix& h, std::span<const double> llrs, std::span<const std::uint8_t> syndrome,
                       std::span<const std::uint8_t> estimate);

/// Decision status saved when a decoding path forks.
struct Snapshot {
    std::vector<VnStatus> vn_status;
    Bits working_syndrome;
    std::vector<std::uint32_t> cn_active_degree;
    double decided_llr_sum = 0.0;
    std::size_t decisions = 0;
};

enum class PeelResult { Ok, Contradiction };

class BpState {
public:
    /// Messages start at the priors; every VN is Undecided.
    BpState(const TannerGraph& graph, std::span<const double> llrs, std::span<const std::uint8_t> syndrome,
            BpConfig config = {});

    /// Resets messages, posteriors and history, keeping the decision status.
    void reinit_messages();

    /// n flooding iterations. With early_stop, returns after the first iteration
    /// whose hard decision satisfies the syndrome. Returns the iterations run.
    std::size_t iterate(std::size_t n, bool early_stop = false);

    [[nodiscard]] Bits hard_decision() const;
    [[nodiscard]] bool hard_bit(std::size_t i) const;
    /// H * hard_decision == original syndrome.
    [[nodiscard]] bool check_syndrome() const;

    /// Fixes an Undecided VN; throws ContractError otherwise.
    void decimate(std::size_t vn, bool value);
    /// Decimates VNs attached to degree-one active CNs until none remain.
    PeelResult peel();

    [[nodiscard]] Snapshot snapshot() const;
    /// Restores the decision status and re-initializes messages.
    void restore(const Snapshot& s);

    [[nodiscard]] std::size_t n_vars() const { return graph_->n_vars(); }
    [[nodiscard]] std::size_t n_checks() const { return graph_->n_checks(); }
    [[nodiscard]] const TannerGraph& graph() const { return *graph_; }
    [[nodiscard]] const BpConfig& config() const { return config_; }
    [[nodiscard]] std::span<const double> priors() const { return llrs_; }
    [[nodiscard]] std::span<const double> posteriors() const { return posterior_; }
    [[nodiscard]] std::span<const double> vn_to_cn() const { return v2c_; }
    [[nodiscard]] std::span<const double> cn_to_vn() const { return c2v_; }
    [[nodiscard]] VnStatus status(std::size_t i) const { return status_[i]; }
    [[nodiscard]] const std::vector<VnStatus>& statuses() const { return status_; }
    [[nodiscard]] const Bits& working_syndrome() const { return working_; }
    [[nodiscard]] const Bits& original_syndrome() const { return syndrome_; }
    [[nodiscard]] std::uint32_t cn_active_degree(std::size_t j) const { return cn_active_[j]; }
    [[nodiscard]] std::size_t vn_static_degree(std::size_t i) const { return graph_->vn_degree(i); }
    [[nodiscard]] double decided_llr_sum() const { return decided_llr_sum_; }
    [[nodiscard]] std::size_t decisions() const { return decisions_; }
    [[nodiscard]] std::size_t iterations() const { return t_; }
    [[nodiscard]] std::size_t total_iterations() const { return total_iterations_; }

    /// Number of valid history entries, min(t, 4).
    [[nodiscard]] std::size_t history_size() const { return t_ < kHistoryLength ? t_ : kHistoryLength; }
    /// Oldest first: [t-3, t-2, t-1, t]. Requires a full history.
    [[nodiscard]] std::array<double, kHistoryLength> history(std::size_t i) const;
    [[nodiscard]] double history_sum(std::size_t i) const;

    /// Active neighbors j of VN i with s_j XOR (parity of Undecided neighbors' hard decisions) = 1.
    [[nodiscard]] std::size_t unsatisfied_neighbors(std::size_t i) const;

private:
    void cn_update();
    void vn_update();

    const TannerGraph* graph_;
    std::vector<double> llrs_;
    BpConfig config_;
    Bits syndrome_;
    Bits working_;
    std::vector<VnStatus> status_;
    std::vector<std::uint32_t> cn_active_;
    std::vector<double> v2c_;
    std::vector<double> c2v_;
    std::vector<double> posterior_;
    std::vector<double> history_;
    std::size_t t_ = 0;
    std::size_t total_iterations_ = 0;
    double decided_llr_sum_ = 0.0;
    std::size_t decisions_ = 0;
};

}  // namespace qgdg
