#include "qgdg/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace qgdg {

Interval wilson_interval(std::uint64_t failures, std::uint64_t trials) {
    if (trials == 0) {
        return {0.0, 1.0};
    }
    constexpr double z = 1.959963984540054;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(failures) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    const double low = failures == 0 ? 0.0 : std::max(0.0, center - half);
    const double high = failures == trials ? 1.0 : std::min(1.0, center + half);
    return {low, high};
}

double per_round_rate(double total, std::size_t rounds) {
    if (!(total >= 0.0 && total <= 1.0) || rounds == 0) {
        throw ContractError("per_round_rate: need P in [0, 1] and R >= 1");
    }
    if (rounds == 1) {
        return total;
    }
    return 1.0 - std::pow(1.0 - total, 1.0 / static_cast<double>(rounds));
}

LowerBoundCoefficients lower_bound_coefficients(const SparseBitMatrix& hx) {
    return {count_weight2_syndrome_configs(hx), config_b_coefficient(hx)};
}

double lower_bound_curve(const LowerBoundCoefficients& c, double p_d, double p_s, double p_base) {
    const double ps2 = p_s * p_s;
    return p_base + static_cast<double>(c.syndrome_pairs) * ps2 +
           static_cast<double>(c.data_syndrome_triples) * p_d * ps2;
}

std::string model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::DataQubit:
            return "data";
        case ModelKind::SingleShot:
            return "single-shot";
        case ModelKind::Phenomenological:
            return "pheno";
        case ModelKind::Dem:
            return "dem";
    }
    return {};
}

ModelKind parse_model_kind(const std::string& name) {
    if (name == "data") {
        return ModelKind::DataQubit;
    }
    if (name == "single-shot") {
        return ModelKind::SingleShot;
    }
    if (name == "pheno") {
        return ModelKind::Phenomenological;
    }
    if (name == "dem") {
        return ModelKind::Dem;
    }
    throw ContractError("unknown model kind '" + name + "' (expected data, single-shot, pheno or dem)");
}

TrialResult run_trial(const DetectorModel& model, const WindowPlan& plan, std::uint64_t seed) {
    const FaultSample sample = qgdg::sample(model, seed);
    const Bits s = sample.detectors.to_dense();
    const SlidingResult r = sliding_decode(model, s, plan);
    TrialResult t;
    t.outcome = judge(model, r.estimate, sample);
    t.all_windows_success = r.all_windows_success;
    t.logical_ok = matvec(model.observables(), r.estimate) == sample.observables.to_dense();
    return t;
}

PointReport run_point(const DetectorModel& model, const WindowPlan& plan, SweepPoint point, std::size_t rounds,
                      std::uint64_t trials, std::uint64_t base_seed, std::size_t threads) {
    std::vector<TrialResult> results(trials);
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (std::uint64_t i = next++; i < trials; i = next++) {
            results[i] = run_trial(model, plan, base_seed + i);
        }
    };
    const std::size_t n_threads = std::max<std::size_t>(1, std::min<std::uint64_t>(threads, trials));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t k = 0; k < n_threads; ++k) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    PointReport rep;
    rep.point = point;
    rep.trials = trials;
    rep.rounds = rounds;
    for (const TrialResult& t : results) {
        switch (t.outcome) {
            case Outcome::Success:
                ++rep.successes;
                break;
            case Outcome::SyndromeFailure:
                ++rep.syndrome_failures;
                if (t.logical_ok) {
                    ++rep.syndrome_failures_logical_ok;
                }
                if (t.all_windows_success) {
                    ++rep.chaining_violations;
                }
                break;
            case Outcome::LogicalFailure:
                ++rep.logical_failures;
                break;
        }
        if (!t.all_windows_success) {
            ++rep.window_failure_trials;
        }
    }
    rep.ler = trials ? static_cast<double>(rep.failures()) / static_cast<double>(trials) : 0.0;
    rep.wilson = wilson_interval(rep.failures(), trials);
    rep.per_round = per_round_rate(rep.ler, rounds);
    return rep;
}

CssCode load_code(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open code file '" + path + "'");
    }
    return build_code(parse_code_description(in));
}

DetectorModel load_dem(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open DEM file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_dem(buf.str());
}

DetectorModel build_model(const ExperimentConfig& config, const CssCode* code, SweepPoint point) {
    if (config.model != ModelKind::Dem && code == nullptr) {
        throw ContractError("build_model: a code is required");
    }
    switch (config.model) {
        case ModelKind::DataQubit:
            return build_data_qubit_model(*code, point.p_d);
        case ModelKind::SingleShot:
            return build_single_shot_model(*code, point.p_d, point.p_s, config.syndrome_observables);
        case ModelKind::Phenomenological:
            return build_phenomenological_model(*code, config.rounds, point.p_d, point.p_s);
        case ModelKind::Dem:
            return load_dem(config.dem_path);
    }
    throw ContractError("build_model: unknown model kind");
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    if (config.trials == 0) {
        throw ContractError("trials must be at least 1");
    }
    if (config.points.empty()) {
        throw ContractError("sweep must contain at least one point");
    }
    std::optional<CssCode> code;
    if (config.model != ModelKind::Dem) {
        code = load_code(config.code_path);
    }
    ExperimentReport report;
    report.config = config;
    std::optional<DetectorModel> dem;
    for (const SweepPoint& point : config.points) {
        WindowPlan plan = config.plan;
        if (config.low_error_below) {
            plan.inner.gdg.low_error_mode = point.p_d <= *config.low_error_below;
        }
        if (config.model == ModelKind::Dem && !dem) {
            dem = build_model(config, nullptr, point);
        }
        const DetectorModel model = dem ? *dem : build_model(config, code ? &*code : nullptr, point);
        report.points.push_back(
            run_point(model, plan, point, config.rounds, config.trials, config.base_seed, config.threads));
    }
    return report;
}

namespace {

using nlohmann::ordered_json;

ordered_json decoder_json(const InnerDecoder& d) {
    ordered_json j;
    j["kind"] = decoder_name(d.kind);
    if (d.kind == DecoderKind::Gdg) {
        j["tree"] = write_tree_config(d.gdg);
    } else {
        j["bp_iterations"] = d.osd.bp_iterations;
        j["order"] = d.osd.order;
        j["scale"] = d.osd.scale;
        if (d.osd.restrict_to) {
            j["restrict_to"] = *d.osd.restrict_to;
        }
    }
    return j;
}

}  // namespace

std::string report_json(const ExperimentReport& report) {
    const ExperimentConfig& c = report.config;
    ordered_json j;
    j["model"] = model_kind_name(c.model);
    if (c.model == ModelKind::Dem) {
        j["dem"] = c.dem_path;
    } else {
        j["code"] = c.code_path;
    }
    j["rounds"] = c.rounds;
    j["syndrome_observables"] = c.syndrome_observables;
    j["window"] = {c.plan.window, c.plan.step};
    j["merge_tail"] = c.plan.merge_tail;
    j["preset"] = c.preset;
    j["decoder"] = decoder_json(c.plan.inner);
    if (c.plan.last_window_override) {
        j["last_window_decoder"] = decoder_json(*c.plan.last_window_override);
    }
    if (c.low_error_below) {
        j["low_error_below"] = *c.low_error_below;
    }
    j["trials"] = c.trials;
    j["base_seed"] = c.base_seed;
    ordered_json points = ordered_json::array();
    for (const PointReport& p : report.points) {
        ordered_json q;
        q["p_d"] = p.point.p_d;
        q["p_s"] = p.point.p_s;
        q["trials"] = p.trials;
        q["successes"] = p.successes;
        q["syndrome_failures"] = p.syndrome_failures;
        q["logical_failures"] = p.logical_failures;
        q["syndrome_failures_logical_ok"] = p.syndrome_failures_logical_ok;
        q["window_failure_trials"] = p.window_failure_trials;
        q["chaining_violations"] = p.chaining_violations;
        q["ler"] = p.ler;
        q["wilson_low"] = p.wilson.low;
        q["wilson_high"] = p.wilson.high;
        q["per_round"] = p.per_round;
        points.push_back(std::move(q));
    }
    j["points"] = std::move(points);
    return j.dump(2) + "\n";
}

std::string report_csv(const ExperimentReport& report) {
    std::ostringstream out;
    out.precision(17);
    out << "p_d,p_s,trials,failures,ler,wilson_low,wilson_high,per_round,syndrome_failures,logical_failures\n";
    for (const PointReport& p : report.points) {
        out << p.point.p_d << ',' << p.point.p_s << ',' << p.trials << ',' << p.failures() << ',' << p.ler << ','
            << p.wilson.low << ',' << p.wilson.high << ',' << p.per_round << ',' << p.syndrome_failures << ','
            << p.logical_failures << '\n';
    }
    return out.str();
}

LatencySummary bench_windows(const DetectorModel& model, const WindowPlan& plan, std::uint64_t trials,
                             std::uint64_t base_seed) {
    std::vector<double> lat;
    for (std::uint64_t i = 0; i < trials; ++i) {
        const FaultSample sample = qgdg::sample(model, base_seed + i);
        const SlidingResult r = sliding_decode(model, sample.detectors.to_dense(), plan);
        for (const auto& w : r.windows) {
            lat.push_back(w.elapsed_us);
        }
    }
    LatencySummary s;
    s.windows = lat.size();
    if (lat.empty()) {
        return s;
    }
    std::sort(lat.begin(), lat.end());
    double sum = 0.0;
    for (double v : lat) {
        sum += v;
        std::size_t bucket = v < 1.0 ? 0 : static_cast<std::size_t>(std::floor(std::log2(v)));
        if (s.histogram.size() <= bucket) {
            s.histogram.resize(bucket + 1, 0);
        }
        ++s.histogram[bucket];
    }
    auto quantile = [&](double q) {
        const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(lat.size()))) - 1;
        return lat[std::min(idx, lat.size() - 1)];
    };
    s.mean_us = sum / static_cast<double>(lat.size());
    s.p50_us = quantile(0.5);
    s.p99_us = quantile(0.99);
    s.max_us = lat.back();
    return s;
}

std::string latency_json(const LatencySummary& s) {
    ordered_json j;
    j["windows"] = s.windows;
    j["mean_us"] = s.mean_us;
    j["p50_us"] = s.p50_us;
    j["p99_us"] = s.p99_us;
    j["max_us"] = s.max_us;
    j["histogram_log2_us"] = s.histogram;
    return j.dump(2) + "\n";
}

}  // namespace qgdg
