#include "qgdg/gdg.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <numeric>
#include <sstream>

#include "qgdg/osd.hpp"

namespace qgdg {

// ---------------------------------------------------------------------------
// Configuration

void DecisionTreeConfig::validate() const {
    if (iters_per_step < kHistoryLength) {
        throw ContractError("iters_per_step must be at least 4");
    }
    if (main_max_depth == 0 || tree_depth == 0) {
        throw ContractError("depth bounds must be positive");
    }
    if (tree_depth > main_max_depth || tree_depth > 16) {
        throw ContractError("tree_depth must not exceed main_max_depth (or 16)");
    }
    for (std::size_t d : side_split_depths) {
        if (d == 0 || d > main_max_depth) {
            throw ContractError("side split depth " + std::to_string(d) + " outside [1, main_max_depth]");
        }
    }
    if (!std::is_sorted(side_split_depths.begin(), side_split_depths.end()) ||
        std::adjacent_find(side_split_depths.begin(), side_split_depths.end()) != side_split_depths.end()) {
        throw ContractError("side split depths must be strictly increasing");
    }
    if (preprocess_iters < kHistoryLength && shorten_factor != 0) {
        throw ContractError("preprocess_iters must be at least 4 when shortening");
    }
    if (!(scale > 0.0) || !(clip > 0.0)) {
        throw ContractError("scale and clip must be positive");
    }
}

namespace {

std::vector<std::size_t> depth_range(std::size_t lo, std::size_t hi) {
    std::vector<std::size_t> out;
    for (std::size_t d = lo; d <= hi; ++d) {
        out.push_back(d);
    }
    return out;
}

}  // namespace

DecisionTreeConfig preset_config(std::string_view name) {
    DecisionTreeConfig c;
    if (name == "n144-circuit") {
        return c;
    }
    if (name == "n288-circuit") {
        c.main_max_depth = 40;
        c.side_split_depths = depth_range(5, 20);
        c.side_extra_steps = 20;
        c.tree_depth = 5;
        c.tree_extra_steps = 20;
        c.preprocess_iters = 16;
        return c;
    }
    if (name == "data-qubit") {
        c.main_max_depth = 40;
        c.side_split_depths = depth_range(5, 20);
        c.side_extra_steps = 30;
        c.tree_depth = 5;
        c.tree_extra_steps = 30;
        c.scale = 0.625;
        c.low_error_mode = true;
        c.preprocess_iters = 16;
        c.shorten_factor = 0;
        return c;
    }
    throw ContractError("unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() { return {"n144-circuit", "n288-circuit", "data-qubit"}; }

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::size_t to_size(std::string_view key, std::string_view v) {
    std::size_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size()) {
        throw ContractError("config: '" + std::string(key) + "' expects an integer, got '" + std::string(v) + "'");
    }
    return out;
}

double to_double(std::string_view key, std::string_view v) {
    double out = 0.0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size()) {
        throw ContractError("config: '" + std::string(key) + "' expects a number, got '" + std::string(v) + "'");
    }
    return out;
}

bool to_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1" || v == "on") {
        return true;
    }
    if (v == "false" || v == "0" || v == "off") {
        return false;
    }
    throw ContractError("config: '" + std::string(key) + "' expects true/false, got '" + std::string(v) + "'");
}

/// "4-10" or "4,5,9" (mixed allowed).
std::vector<std::size_t> to_depths(std::string_view key, std::string_view v) {
    std::vector<std::size_t> out;
    while (!v.empty()) {
        auto comma = v.find(',');
        std::string_view item = trim(v.substr(0, comma));
        v = comma == std::string_view::npos ? std::string_view{} : v.substr(comma + 1);
        if (item.empty()) {
            continue;
        }
        if (auto dash = item.find('-'); dash != std::string_view::npos) {
            auto lo = to_size(key, trim(item.substr(0, dash)));
            auto hi = to_size(key, trim(item.substr(dash + 1)));
            for (std::size_t d = lo; d <= hi; ++d) {
                out.push_back(d);
            }
        } else {
            out.push_back(to_size(key, item));
        }
    }
    return out;
}

std::string fmt(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

}  // namespace

DecisionTreeConfig parse_tree_config(std::string_view text) {
    std::vector<std::pair<std::string, std::string>> entries;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (auto h = line.find('#'); h != std::string_view::npos) {
            line = line.substr(0, h);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ContractError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        entries.emplace_back(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
    }
    DecisionTreeConfig c;
    for (const auto& [k, v] : entries) {
        if (k == "preset") {
            c = preset_config(v);
        }
    }
    for (const auto& [k, v] : entries) {
        if (k == "preset") {
            continue;
        } else if (k == "iters_per_step") {
            c.iters_per_step = to_size(k, v);
        } else if (k == "main_max_depth") {
            c.main_max_depth = to_size(k, v);
        } else if (k == "side_split_depths") {
            c.side_split_depths = to_depths(k, v);
        } else if (k == "side_extra_steps") {
            c.side_extra_steps = to_size(k, v);
        } else if (k == "tree_depth") {
            c.tree_depth = to_size(k, v);
        } else if (k == "tree_extra_steps") {
            c.tree_extra_steps = to_size(k, v);
        } else if (k == "low_error_mode") {
            c.low_error_mode = to_bool(k, v);
        } else if (k == "agg_main_all") {
            c.agg.main_all = to_double(k, v);
        } else if (k == "agg_side_all") {
            c.agg.side_all = to_double(k, v);
        } else if (k == "agg_main_sum") {
            c.agg.main_sum = to_double(k, v);
        } else if (k == "agg_side_sum") {
            c.agg.side_sum = to_double(k, v);
        } else if (k == "agg_first_step_sum") {
            c.agg.first_step_sum = to_double(k, v);
        } else if (k == "agg_confident_zero") {
            c.agg.confident_zero = to_double(k, v);
        } else if (k == "agg_confident_zero_max_depth") {
            c.agg.confident_zero_max_depth = to_size(k, v);
        } else if (k == "agg_weak_zero") {
            c.agg.weak_zero = to_double(k, v);
        } else if (k == "agg_unsatisfied_min") {
            c.agg.unsatisfied_min = to_size(k, v);
        } else if (k == "preprocess_iters") {
            c.preprocess_iters = to_size(k, v);
        } else if (k == "shorten_factor") {
            c.shorten_factor = to_size(k, v);
        } else if (k == "scale") {
            c.scale = to_double(k, v);
        } else if (k == "clip") {
            c.clip = to_double(k, v);
        } else if (k == "prune") {
            c.prune = to_bool(k, v);
        } else {
            throw ContractError("config: unknown key '" + k + "'");
        }
    }
    c.validate();
    return c;
}

std::string write_tree_config(const DecisionTreeConfig& c) {
    std::ostringstream out;
    out << "iters_per_step = " << c.iters_per_step << "\n";
    out << "main_max_depth = " << c.main_max_depth << "\n";
    out << "side_split_depths = ";
    for (std::size_t i = 0; i < c.side_split_depths.size(); ++i) {
        out << (i ? "," : "") << c.side_split_depths[i];
    }
    out << "\n";
    out << "side_extra_steps = " << c.side_extra_steps << "\n";
    out << "tree_depth = " << c.tree_depth << "\n";
    out << "tree_extra_steps = " << c.tree_extra_steps << "\n";
    out << "low_error_mode = " << (c.low_error_mode ? "true" : "false") << "\n";
    out << "agg_main_all = " << fmt(c.agg.main_all) << "\n";
    out << "agg_side_all = " << fmt(c.agg.side_all) << "\n";
    out << "agg_main_sum = " << fmt(c.agg.main_sum) << "\n";
    out << "agg_side_sum = " << fmt(c.agg.side_sum) << "\n";
    out << "agg_first_step_sum = " << fmt(c.agg.first_step_sum) << "\n";
    out << "agg_confident_zero = " << fmt(c.agg.confident_zero) << "\n";
    out << "agg_confident_zero_max_depth = " << c.agg.confident_zero_max_depth << "\n";
    out << "agg_weak_zero = " << fmt(c.agg.weak_zero) << "\n";
    out << "agg_unsatisfied_min = " << c.agg.unsatisfied_min << "\n";
    out << "preprocess_iters = " << c.preprocess_iters << "\n";
    out << "shorten_factor = " << c.shorten_factor << "\n";
    out << "scale = " << fmt(c.scale) << "\n";
    out << "clip = " << fmt(c.clip) << "\n";
    out << "prune = " << (c.prune ? "true" : "false") << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Branches

bool BranchSpec::value(std::size_t depth, bool favored, std::size_t tree_depth) const {
    switch (kind) {
        case BranchKind::Main:
            return favored;
        case BranchKind::Side:
            return depth == param ? !favored : favored;
        case BranchKind::Tree:
            if (depth > tree_depth) {
                return favored;
            }
            return ((param >> (tree_depth - depth)) & 1U) ? !favored : favored;
    }
    return favored;
}

std::string BranchSpec::name() const {
    switch (kind) {
        case BranchKind::Main:
            return "main";
        case BranchKind::Side:
            return "side" + std::to_string(param);
        case BranchKind::Tree:
            return "tree" + std::to_string(param);
    }
    return {};
}

std::vector<BranchSpec> enumerate_branches(const DecisionTreeConfig& config) {
    config.validate();
    std::vector<BranchSpec> out;
    out.push_back({BranchKind::Main, 0, config.main_max_depth});
    for (std::size_t d : config.side_split_depths) {
        out.push_back({BranchKind::Side, d, d + config.side_extra_steps});
    }
    const std::size_t leaves = std::size_t{1} << config.tree_depth;
    for (std::size_t id = 2; id < leaves; ++id) {
        out.push_back({BranchKind::Tree, id, config.tree_depth + config.tree_extra_steps});
    }
    return out;
}

std::size_t critical_path_iterations(const DecisionTreeConfig& config) {
    std::size_t depth = 0;
    for (const auto& b : enumerate_branches(config)) {
        depth = std::max(depth, b.max_depth);
    }
    return depth * config.iters_per_step;
}

// ---------------------------------------------------------------------------
// Selection

int agg_dec(const std::array<double, kHistoryLength>& history, std::size_t depth, bool on_main_branch,
            std::size_t unsatisfied_neighbors, const AggThresholds& t) {
    const double pa = on_main_branch ? t.main_all : t.side_all;
    const double pb = depth == 1 ? t.first_step_sum : (on_main_branch ? t.main_sum : t.side_sum);
    double sum = 0.0;
    bool all_below_a = true;
    bool all_above_c = true;
    bool all_above_d = true;
    for (double v : history) {
        sum += v;
        all_below_a = all_below_a && v < pa;
        all_above_c = all_above_c && v > t.confident_zero;
        all_above_d = all_above_d && v > t.weak_zero;
    }
    if (all_below_a && sum < pb) {
        return 1;
    }
    if ((all_above_c && depth <= t.confident_zero_max_depth) ||
        (all_above_d && unsatisfied_neighbors >= t.unsatisfied_min)) {
        return 0;
    }
    return -1;
}

std::optional<VnChoice> pick_vn(std::span<const VnHistory> candidates) {
    double l_min = std::numeric_limits<double>::infinity();
    std::optional<std::size_t> g_min;
    double neg_min = std::numeric_limits<double>::infinity();
    std::optional<std::size_t> neg_g;
    for (const VnHistory& c : candidates) {
        double sum = 0.0;
        bool nonpositive = true;
        for (double v : c.history) {
            sum += v;
            nonpositive = nonpositive && v <= 0.0;
        }
        if (sum < l_min) {
            l_min = sum;
            g_min = c.vn;
        }
        if (nonpositive && sum < neg_min) {
            neg_min = sum;
            neg_g = c.vn;
        }
    }
    if (neg_g) {
        return VnChoice{*neg_g, true};
    }
    if (g_min) {
        return VnChoice{*g_min, l_min <= 0.0};
    }
    return std::nullopt;
}

std::optional<VnChoice> select_vn(BpState& state, std::size_t depth, bool on_main_branch,
                                  const DecisionTreeConfig& config) {
    std::vector<VnHistory> candidates;
    for (std::size_t i = 0; i < state.n_vars(); ++i) {
        if (state.status(i) != VnStatus::Undecided || state.vn_static_degree(i) <= 2) {
            continue;
        }
        const auto hist = state.history(i);
        if (!config.low_error_mode) {
            const bool above_weak =
                std::all_of(hist.begin(), hist.end(), [&](double v) { return v > config.agg.weak_zero; });
            const std::size_t unsat = above_weak ? state.unsatisfied_neighbors(i) : 0;
            const int b = agg_dec(hist, depth, on_main_branch, unsat, config.agg);
            if (b != -1) {
                state.decimate(i, b == 1);
                continue;
            }
        }
        candidates.push_back({i, hist});
    }
    return pick_vn(candidates);
}

// ---------------------------------------------------------------------------
// Preprocessing

ShortenedProblem preprocess_shorten(const SparseBitMatrix& h, std::span<const double> llrs,
                                    std::span<const std::uint8_t> s, const DecisionTreeConfig& config) {
    const std::size_t keep = config.shorten_factor * h.n_rows();
    ShortenedProblem out;
    if (config.shorten_factor == 0 || keep >= h.n_cols()) {
        out.h = h;
        out.llrs.assign(llrs.begin(), llrs.end());
        out.column_map.resize(h.n_cols());
        std::iota(out.column_map.begin(), out.column_map.end(), Index{0});
        return out;
    }
    TannerGraph graph(h);
    BpState state(graph, llrs, s, BpConfig{config.scale, config.clip});
    state.iterate(config.preprocess_iters);
    auto order = rank_columns(ranking_scores(state));
    out.column_map.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep));
    std::sort(out.column_map.begin(), out.column_map.end());
    out.h = h.select_columns(out.column_map);
    out.llrs.reserve(keep);
    for (Index c : out.column_map) {
        out.llrs.push_back(llrs[c]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Execution

namespace {

double estimate_cost(const BpState& state) {
    double sum = 0.0;
    for (std::size_t i = 0; i < state.n_vars(); ++i) {
        if (state.hard_bit(i)) {
            sum += state.priors()[i];
        }
    }
    return sum;
}

bool better(const PathMetric& pm, std::size_t idx, const PathMetric& best, std::optional<std::size_t> best_idx) {
    if (!pm.is_finite()) {
        return false;
    }
    if (!best_idx || pm.value() < best.value()) {
        return true;
    }
    return pm.value() == best.value() && idx < *best_idx;
}

class Explorer {
public:
    Explorer(const TannerGraph& graph, std::span<const double> llrs, std::span<const std::uint8_t> s,
             const DecisionTreeConfig& config, const std::vector<BranchSpec>& branches)
        : state_(graph, llrs, s, BpConfig{config.scale, config.clip}),
          config_(config),
          branches_(branches),
          outcomes_(branches.size()) {}

    void run() {
        std::vector<std::size_t> all(branches_.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        if (state_.peel() == PeelResult::Contradiction) {
            finish(all, BranchStatus::Contradiction, 0, 0);
            return;
        }
        explore(all, 1, false, 0);
    }

    [[nodiscard]] const std::vector<BranchOutcome>& outcomes() const { return outcomes_; }
    [[nodiscard]] const Bits& best_estimate() const { return best_estimate_; }
    [[nodiscard]] const PathMetric& best_pm() const { return best_pm_; }
    [[nodiscard]] std::optional<std::size_t> winner() const { return winner_; }
    [[nodiscard]] std::size_t total_iterations() const { return state_.total_iterations(); }

private:
    void finish(const std::vector<std::size_t>& group, BranchStatus status, std::size_t depth, std::size_t iters) {
        for (std::size_t b : group) {
            outcomes_[b] = BranchOutcome{status, PathMetric::infinite(), depth, iters};
        }
    }

    void explore(std::vector<std::size_t> group, std::size_t depth, bool deviated, std::size_t iters) {
        std::vector<std::size_t> alive;
        for (std::size_t b : group) {
            if (branches_[b].max_depth < depth) {
                outcomes_[b] = BranchOutcome{BranchStatus::Exhausted, PathMetric::infinite(), depth - 1, iters};
            } else {
                alive.push_back(b);
            }
        }
        if (alive.empty()) {
            return;
        }
        iters += state_.iterate(config_.iters_per_step, true);
        if (state_.check_syndrome()) {
            const PathMetric pm = PathMetric::finite(estimate_cost(state_));
            for (std::size_t b : alive) {
                outcomes_[b] = BranchOutcome{BranchStatus::Converged, pm, depth, iters};
            }
            if (better(pm, alive.front(), best_pm_, winner_)) {
                best_pm_ = pm;
                winner_ = alive.front();
                best_estimate_ = state_.hard_decision();
            }
            return;
        }
        const auto choice = select_vn(state_, depth, !deviated, config_);
        std::vector<std::size_t> follow;
        std::vector<std::size_t> deviate;
        for (std::size_t b : alive) {
            if (choice && branches_[b].value(depth, choice->favored, config_.tree_depth) != choice->favored) {
                deviate.push_back(b);
            } else {
                follow.push_back(b);
            }
        }
        std::optional<Snapshot> snap;
        if (!deviate.empty()) {
            snap = state_.snapshot();
        }
        if (!follow.empty()) {
            if (choice) {
                state_.decimate(choice->vn, choice->favored);
            }
            advance(follow, depth, deviated, iters);
        }
        if (!deviate.empty()) {
            state_.restore(*snap);
            state_.decimate(choice->vn, !choice->favored);
            advance(deviate, depth, true, iters);
        }
    }

    void advance(const std::vector<std::size_t>& group, std::size_t depth, bool deviated, std::size_t iters) {
        if (state_.peel() == PeelResult::Contradiction) {
            finish(group, BranchStatus::Contradiction, depth, iters);
            return;
        }
        if (config_.prune && winner_ && state_.decided_llr_sum() > best_pm_.value()) {
            finish(group, BranchStatus::Pruned, depth, iters);
            return;
        }
        explore(group, depth + 1, deviated, iters);
    }

    BpState state_;
    const DecisionTreeConfig& config_;
    const std::vector<BranchSpec>& branches_;
    std::vector<BranchOutcome> outcomes_;
    PathMetric best_pm_;
    std::optional<std::size_t> winner_;
    Bits best_estimate_;
};

GdgResult assemble(const SparseBitMatrix& h, const ShortenedProblem& problem, std::vector<BranchSpec> branches,
                   std::vector<BranchOutcome> outcomes, std::optional<std::size_t> winner, const Bits& estimate,
                   PathMetric pm, std::size_t total_iterations) {
    GdgResult r;
    r.branches = std::move(branches);
    r.outcomes = std::move(outcomes);
    r.total_iterations = total_iterations;
    r.kept_columns = problem.column_map.size();
    r.estimate.assign(h.n_cols(), 0);
    r.winner = winner;
    r.pm = pm;
    r.success = winner.has_value();
    if (r.success) {
        for (std::size_t k = 0; k < estimate.size(); ++k) {
            if (estimate[k]) {
                r.estimate[problem.column_map[k]] = 1;
            }
        }
    }
    return r;
}

}  // namespace

BranchRun run_branch(const TannerGraph& graph, std::span<const double> llrs, std::span<const std::uint8_t> s,
                     const BranchSpec& spec, const DecisionTreeConfig& config) {
    BpState state(graph, llrs, s, BpConfig{config.scale, config.clip});
    BranchRun run;
    run.estimate.assign(graph.n_vars(), 0);
    if (state.peel() == PeelResult::Contradiction) {
        run.outcome = BranchOutcome{BranchStatus::Contradiction, PathMetric::infinite(), 0, 0};
        return run;
    }
    bool deviated = false;
    std::size_t iters = 0;
    for (std::size_t depth = 1; depth <= spec.max_depth; ++depth) {
        iters += state.iterate(config.iters_per_step, true);
        if (state.check_syndrome()) {
            run.estimate = state.hard_decision();
            run.outcome = BranchOutcome{BranchStatus::Converged, PathMetric::finite(estimate_cost(state)), depth, iters};
            return run;
        }
        if (auto choice = select_vn(state, depth, !deviated, config)) {
            const bool v = spec.value(depth, choice->favored, config.tree_depth);
            state.decimate(choice->vn, v);
            if (v != choice->favored) {
                state.reinit_messages();
                deviated = true;
            }
        }
        if (state.peel() == PeelResult::Contradiction) {
            run.outcome = BranchOutcome{BranchStatus::Contradiction, PathMetric::infinite(), depth, iters};
            return run;
        }
    }
    run.outcome = BranchOutcome{BranchStatus::Exhausted, PathMetric::infinite(), spec.max_depth, iters};
    return run;
}

GdgResult gdg_decode(const SparseBitMatrix& h, std::span<const double> llrs, std::span<const std::uint8_t> s,
                     const DecisionTreeConfig& config) {
    config.validate();
    if (llrs.size() != h.n_cols() || s.size() != h.n_rows()) {
        throw ContractError("gdg_decode: dimension mismatch");
    }
    auto branches = enumerate_branches(config);
    const ShortenedProblem problem = preprocess_shorten(h, llrs, s, config);
    TannerGraph graph(problem.h);
    Explorer ex(graph, problem.llrs, s, config, branches);
    ex.run();
    return assemble(h, problem, std::move(branches), ex.outcomes(), ex.winner(), ex.best_estimate(), ex.best_pm(),
                    ex.total_iterations());
}

GdgResult gdg_decode_replay(const SparseBitMatrix& h, std::span<const double> llrs, std::span<const std::uint8_t> s,
                            const DecisionTreeConfig& config) {
    config.validate();
    if (llrs.size() != h.n_cols() || s.size() != h.n_rows()) {
        throw ContractError("gdg_decode: dimension mismatch");
    }
    auto branches = enumerate_branches(config);
    const ShortenedProblem problem = preprocess_shorten(h, llrs, s, config);
    TannerGraph graph(problem.h);
    std::vector<BranchOutcome> outcomes;
    std::optional<std::size_t> winner;
    PathMetric best;
    Bits best_estimate;
    std::size_t total = 0;
    for (std::size_t b = 0; b < branches.size(); ++b) {
        BranchRun run = run_branch(graph, problem.llrs, s, branches[b], config);
        total += run.outcome.path_iterations;
        if (better(run.outcome.pm, b, best, winner)) {
            best = run.outcome.pm;
            winner = b;
            best_estimate = run.estimate;
        }
        outcomes.push_back(run.outcome);
    }
    return assemble(h, problem, std::move(branches), std::move(outcomes), winner, best_estimate, best, total);
}

}  // namespace qgdg
