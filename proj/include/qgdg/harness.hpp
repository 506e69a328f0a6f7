#pragma once

// Seeded Monte-Carlo experiments, statistics and report persistence.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qgdg/codes.hpp"
#include "qgdg/noise_model.hpp"
#include "qgdg/window.hpp"

namespace qgdg {

struct Interval {
    double low = 0.0;
    double high = 0.0;
    [[nodiscard]] double half_width() const { return 0.5 * (high - low); }
};

/// Wilson score interval at 95% confidence.
Interval wilson_interval(std::uint64_t failures, std::uint64_t trials);

/// 1 - (1 - P)^(1/R)
double per_round_rate(double total, std::size_t rounds);

struct LowerBoundCoefficients {
    std::uint64_t syndrome_pairs = 0;
    std::uint64_t data_syndrome_triples = 0;
};

LowerBoundCoefficients lower_bound_coefficients(const SparseBitMatrix& hx);

/// p_base + c_a p_s^2 + c_b p_d p_s^2
double lower_bound_curve(const LowerBoundCoefficients& c, double p_d, double p_s, double p_base);

enum class ModelKind { DataQubit, SingleShot, Phenomenological, Dem };

std::string model_kind_name(ModelKind k);
ModelKind parse_model_kind(const std::string& name);

struct SweepPoint {
    double p_d = 0.0;
    double p_s = 0.0;
    bool operator==(const SweepPoint&) const = default;
};

struct ExperimentConfig {
    ModelKind model = ModelKind::SingleShot;
    std::string code_path;
    std::string dem_path;
    std::size_t rounds = 1;
    bool syndrome_observables = true;
    std::vector<SweepPoint> points;
    WindowPlan plan;
    std::string preset;
    /// When set, low-error mode is enabled exactly at points with p_d <= this value.
    std::optional<double> low_error_below;
    std::uint64_t trials = 1000;
    std::uint64_t base_seed = 1;
    std::size_t threads = 1;
};

struct TrialResult {
    Outcome outcome = Outcome::Success;
    bool all_windows_success = true;
    bool logical_ok = true;
};

TrialResult run_trial(const DetectorModel& model, const WindowPlan& plan, std::uint64_t seed);

struct PointReport {
    SweepPoint point;
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    std::uint64_t syndrome_failures = 0;
    std::uint64_t logical_failures = 0;
    /// Syndrome failures whose logical observables were nevertheless correct.
    std::uint64_t syndrome_failures_logical_ok = 0;
    std::uint64_t window_failure_trials = 0;
    /// Trials where every window succeeded but the assembled estimate violates H e = s.
    std::uint64_t chaining_violations = 0;
    double ler = 0.0;
    Interval wilson;
    std::size_t rounds = 1;
    double per_round = 0.0;

    [[nodiscard]] std::uint64_t failures() const { return syndrome_failures + logical_failures; }
};

/// Trials seeded base_seed + i, spread over `threads` workers; results fold in trial order.
PointReport run_point(const DetectorModel& model, const WindowPlan& plan, SweepPoint point, std::size_t rounds,
                      std::uint64_t trials, std::uint64_t base_seed, std::size_t threads);

CssCode load_code(const std::string& path);
DetectorModel load_dem(const std::string& path);

/// Builds the model of one sweep point.
DetectorModel build_model(const ExperimentConfig& config, const CssCode* code, SweepPoint point);

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<PointReport> points;
};

ExperimentReport run_experiment(const ExperimentConfig& config);

/// Deterministic JSON document (no timing data).
std::string report_json(const ExperimentReport& report);
std::string report_csv(const ExperimentReport& report);

struct LatencySummary {
    std::size_t windows = 0;
    double mean_us = 0.0;
    double p50_us = 0.0;
    double p99_us = 0.0;
    double max_us = 0.0;
    /// counts per power-of-two microsecond bucket: [2^k, 2^(k+1))
    std::vector<std::uint64_t> histogram;
};

/// Per-window wall-clock latency of the inner decoder, single threaded.
LatencySummary bench_windows(const DetectorModel& model, const WindowPlan& plan, std::uint64_t trials,
                             std::uint64_t base_seed);

std::string latency_json(const LatencySummary& s);

}  // namespace qgdg
