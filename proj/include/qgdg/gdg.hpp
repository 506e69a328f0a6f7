#pragma once

// Guided decimation guessing: an ensemble of BP decimation paths reduced by minimum path metric.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qgdg/bp.hpp"
#include "qgdg/gf2.hpp"

namespace qgdg {

struct AggThresholds {
    double main_all = -3.0;
    double side_all = 0.0;
    double main_sum = -12.0;
    double side_sum = -10.0;
    double first_step_sum = -16.0;
    double confident_zero = 30.0;
    std::size_t confident_zero_max_depth = 4;
    double weak_zero = 3.0;
    std::size_t unsatisfied_min = 3;
};

struct DecisionTreeConfig {
    std::size_t iters_per_step = 6;
    std::size_t main_max_depth = 25;
    std::vector<std::size_t> side_split_depths = {4, 5, 6, 7, 8, 9, 10};
    std::size_t side_extra_steps = 10;
    std::size_t tree_depth = 4;
    std::size_t tree_extra_steps = 10;
    bool low_error_mode = false;
    AggThresholds agg;
    std::size_t preprocess_iters = 8;
    /// Keep shorten_factor * rows columns after preprocessing; 0 disables shortening.
    std::size_t shorten_factor = 2;
    double scale = 1.0;
    double clip = kDefaultClip;
    /// Abandon a path once its decided ones already cost more than the best path found.
    bool prune = true;

    /// Throws ContractError on inconsistent settings.
    void validate() const;
};

/// Presets: "n144-circuit", "n288-circuit", "data-qubit".
DecisionTreeConfig preset_config(std::string_view name);
std::vector<std::string> preset_names();

/// "key = value" lines, '#' comments. A "preset" key, if present, is applied first.
DecisionTreeConfig parse_tree_config(std::string_view text);
std::string write_tree_config(const DecisionTreeConfig& config);

enum class BranchKind { Main, Side, Tree };

struct BranchSpec {
    BranchKind kind = BranchKind::Main;
    /// Split depth for Side, leaf id for Tree.
    std::size_t param = 0;
    std::size_t max_depth = 0;

    /// Decimation value at depth `depth` given the favored value.
    [[nodiscard]] bool value(std::size_t depth, bool favored, std::size_t tree_depth) const;
    [[nodiscard]] std::string name() const;
};

/// Main, then Side by ascending split depth, then Tree ids 2 .. 2^tree_depth - 1.
/// Tree leaf `id` deviates from the favored value at depth D <= tree_depth when
/// bit (tree_depth - D) of id is set, so depth 1 is the most significant bit.
std::vector<BranchSpec> enumerate_branches(const DecisionTreeConfig& config);

/// Longest path in BP iterations over all branches.
std::size_t critical_path_iterations(const DecisionTreeConfig& config);

int agg_dec(const std::array<double, kHistoryLength>& history, std::size_t depth, bool on_main_branch,
            std::size_t unsatisfied_neighbors, const AggThresholds& t);

struct VnChoice {
    std::size_t vn = 0;
    bool favored = false;
};

struct VnHistory {
    std::size_t vn = 0;
    std::array<double, kHistoryLength> history{};
};

/// Most negative sum among all-nonpositive histories (favoring 1), else the minimum
/// sum, favoring 1 when it is <= 0. Ties go to the earliest candidate.
std::optional<VnChoice> pick_vn(std::span<const VnHistory> candidates);

/// VN selection from the posterior histories of Undecided VNs with static degree >= 3.
/// Outside low-error mode VNs judged reliable by agg_dec are decimated during the scan.
/// nullopt when no eligible VN remains.
std::optional<VnChoice> select_vn(BpState& state, std::size_t depth, bool on_main_branch,
                                  const DecisionTreeConfig& config);

struct ShortenedProblem {
    SparseBitMatrix h;
    std::vector<double> llrs;
    /// shortened column -> original column
    std::vector<Index> column_map;
};

ShortenedProblem preprocess_shorten(const SparseBitMatrix& h, std::span<const double> llrs,
                                    std::span<const std::uint8_t> s, const DecisionTreeConfig& config);

enum class BranchStatus { Converged, Exhausted, Contradiction, Pruned };

struct BranchOutcome {
    BranchStatus status = BranchStatus::Exhausted;
    PathMetric pm;
    std::size_t depth = 0;
    std::size_t path_iterations = 0;
};

struct BranchRun {
    BranchOutcome outcome;
    Bits estimate;
};

/// Runs one branch from the root, replaying the shared prefix.
BranchRun run_branch(const TannerGraph& graph, std::span<const double> llrs, std::span<const std::uint8_t> s,
                     const BranchSpec& spec, const DecisionTreeConfig& config);

struct GdgResult {
    bool success = false;
    Bits estimate;
    PathMetric pm;
    std::optional<std::size_t> winner;
    std::vector<BranchSpec> branches;
    std::vector<BranchOutcome> outcomes;
    std::size_t total_iterations = 0;
    std::size_t kept_columns = 0;
};

/// Full decoder: shortening, then the branch ensemble run depth-first with shared
/// prefixes. Ties in path metric go to the earlier branch in enumeration order.
GdgResult gdg_decode(const SparseBitMatrix& h, std::span<const double> llrs, std::span<const std::uint8_t> s,
                     const DecisionTreeConfig& config);

/// Same ensemble with every branch replayed independently from the root (no pruning).
GdgResult gdg_decode_replay(const SparseBitMatrix& h, std::span<const double> llrs, std::span<const std::uint8_t> s,
                            const DecisionTreeConfig& config);

}  // namespace qgdg
