#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qgdg/codes.hpp"
#include "qgdg/harness.hpp"

using namespace qgdg;
using nlohmann::ordered_json;

namespace {

constexpr int kConfigError = 2;
constexpr int kIoError = 3;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out || !(out << text)) {
        throw IoError("cannot write '" + path + "'");
    }
}

std::vector<double> split_doubles(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = std::stod(item, &used);
        if (used != item.size()) {
            throw ContractError("bad number '" + item + "'");
        }
        out.push_back(v);
    }
    return out;
}

std::vector<std::size_t> split_sizes(const std::string& text) {
    std::vector<std::size_t> out;
    for (double v : split_doubles(text)) {
        if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
            throw ContractError("expected a non-negative integer list, got '" + text + "'");
        }
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

// Options shared by every subcommand that builds a model and decodes it.
struct ModelOptions {
    std::string kind;
    std::string code;
    std::string dem;
    std::size_t rounds = 1;
    bool no_syndrome_observables = false;
    std::string points;
    std::string pd;
    std::string ps;

    void add(CLI::App* app, bool with_kind) {
        if (with_kind) {
            app->add_option("--model", kind, "data | single-shot | pheno | dem (default: dem with --dem, else single-shot)");
        }
        app->add_option("--code", code, "code description file");
        app->add_option("--dem", dem, "detector error model file");
        app->add_option("--rounds", rounds, "noisy rounds; per-round rates use it")->capture_default_str();
        app->add_flag("--no-syndrome-observables", no_syndrome_observables,
                      "single-shot: judge logical rows only");
        app->add_option("--points", points, "sweep points p_d:p_s,p_d:p_s,...");
        app->add_option("--pd", pd, "comma list of p_d");
        app->add_option("--ps", ps, "comma list of p_s (defaults to p_d)");
    }

    [[nodiscard]] std::string model_kind() const {
        if (!kind.empty()) {
            return kind;
        }
        return dem.empty() ? "single-shot" : "dem";
    }

    [[nodiscard]] std::vector<SweepPoint> sweep() const {
        std::vector<SweepPoint> out;
        if (!points.empty()) {
            std::stringstream ss(points);
            std::string item;
            while (std::getline(ss, item, ',')) {
                const auto colon = item.find(':');
                if (colon == std::string::npos) {
                    throw ContractError("sweep point '" + item + "' is not p_d:p_s");
                }
                out.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
            }
            return out;
        }
        if (pd.empty()) {
            if (model_kind() == "dem") {
                return {{0.0, 0.0}};
            }
            throw ContractError("no sweep points: give --points or --pd");
        }
        const auto d = split_doubles(pd);
        const auto s = ps.empty() ? d : split_doubles(ps);
        if (s.size() != 1 && s.size() != d.size()) {
            throw ContractError("--ps needs one value or as many as --pd");
        }
        for (std::size_t k = 0; k < d.size(); ++k) {
            out.push_back({d[k], s.size() == 1 ? s[0] : s[k]});
        }
        return out;
    }

    void fill(ExperimentConfig& c) const {
        c.model = parse_model_kind(model_kind());
        c.code_path = code;
        c.dem_path = dem;
        c.rounds = rounds;
        c.syndrome_observables = !no_syndrome_observables;
        c.points = sweep();
        if (c.model == ModelKind::Dem && dem.empty()) {
            throw ContractError("--dem is required for the dem model");
        }
        if (c.model != ModelKind::Dem && code.empty()) {
            throw ContractError("--code is required");
        }
        if (!code.empty() && !std::filesystem::exists(code)) {
            throw IoError("cannot open '" + code + "'");
        }
        if (!dem.empty() && !std::filesystem::exists(dem)) {
            throw IoError("cannot open '" + dem + "'");
        }
    }
};

struct DecoderOptions {
    std::string window = "1,1";
    std::string decoder = "gdg";
    std::string last_decoder;
    std::string preset = "n144-circuit";
    std::string config;
    std::size_t osd_order = 10;
    std::size_t bp_iterations = 200;
    double osd_scale = 1.0;
    std::size_t osd_restrict = 0;
    bool merge_tail = false;

    void add(CLI::App* app) {
        app->add_option("--window", window, "W,F")->capture_default_str();
        app->add_option("--decoder", decoder, "gdg | osd0 | osd-cs")->capture_default_str();
        app->add_option("--last-window-decoder", last_decoder, "decoder for the final window");
        app->add_option("--preset", preset, "n144-circuit | n288-circuit | data-qubit")->capture_default_str();
        app->add_option("--config", config, "decision tree config file (key = value)");
        app->add_option("--osd-order", osd_order, "OSD-CS order")->capture_default_str();
        app->add_option("--bp-iters", bp_iterations, "BP iterations before OSD")->capture_default_str();
        app->add_option("--osd-scale", osd_scale, "BP scaling factor before OSD")->capture_default_str();
        app->add_option("--osd-restrict", osd_restrict, "sweep only the first n ranked columns (0: all)");
        app->add_flag("--merge-tail", merge_tail, "merge weight-one tail columns of each window");
    }

    [[nodiscard]] InnerDecoder inner(const std::string& name) const {
        InnerDecoder d;
        d.kind = parse_decoder_kind(name);
        d.gdg = config.empty() ? preset_config(preset) : parse_tree_config(read_file(config));
        d.gdg.validate();
        d.osd.order = osd_order;
        d.osd.bp_iterations = bp_iterations;
        d.osd.scale = osd_scale;
        if (osd_restrict > 0) {
            d.osd.restrict_to = osd_restrict;
        }
        return d;
    }

    [[nodiscard]] WindowPlan plan() const {
        const auto wf = split_sizes(window);
        if (wf.size() != 2) {
            throw ContractError("--window expects W,F");
        }
        WindowPlan p;
        p.window = wf[0];
        p.step = wf[1];
        p.inner = inner(decoder);
        p.merge_tail = merge_tail;
        if (!last_decoder.empty()) {
            p.last_window_override = inner(last_decoder);
        }
        return p;
    }

    [[nodiscard]] std::string preset_label() const { return config.empty() ? preset : config; }
};

DetectorModel single_model(const ExperimentConfig& c) {
    if (c.points.size() != 1 && c.model != ModelKind::Dem) {
        throw ContractError("exactly one sweep point is needed here");
    }
    std::optional<CssCode> code;
    if (c.model != ModelKind::Dem) {
        code = load_code(c.code_path);
    }
    return build_model(c, code ? &*code : nullptr, c.points.front());
}

ordered_json windows_json(const SlidingResult& r) {
    ordered_json arr = ordered_json::array();
    for (const auto& w : r.windows) {
        ordered_json j;
        j["blocks"] = {w.start_block, w.end_block};
        j["rows"] = w.rows;
        j["cols"] = w.cols;
        j["success"] = w.success;
        if (w.pm.is_finite()) {
            j["pm"] = w.pm.value();
        } else {
            j["pm"] = nullptr;
        }
        j["iterations"] = w.iterations;
        j["committed_ones"] = w.committed_ones;
        arr.push_back(std::move(j));
    }
    return arr;
}

Bits read_syndrome(const std::string& path, std::size_t detectors) {
    // Whitespace-separated indices of fired detectors.
    std::istringstream in(read_file(path));
    Bits s(detectors, 0);
    long long idx = 0;
    while (in >> idx) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= detectors) {
            throw ContractError("detector index " + std::to_string(idx) + " out of range");
        }
        s[static_cast<std::size_t>(idx)] ^= 1U;
    }
    if (!in.eof()) {
        throw ContractError("syndrome file must contain detector indices only");
    }
    return s;
}

std::vector<std::size_t> parse_exponents(const std::string& text) { return split_sizes(text); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sliding-window GDG decoding toolkit for bivariate bicycle codes"};
    app.require_subcommand(1);

    // build-code
    auto* build_code_cmd = app.add_subcommand("build-code", "construct a code and export its matrices");
    std::string bc_code;
    std::string bc_out;
    build_code_cmd->add_option("--code", bc_code, "code description file")->required();
    build_code_cmd->add_option("--out", bc_out, "output directory")->required();

    // build-model
    auto* build_model_cmd = app.add_subcommand("build-model", "write a detector error model");
    std::string bm_kind;
    ModelOptions bm;
    std::string bm_out;
    bool bm_merge = false;
    build_model_cmd->add_option("kind", bm_kind, "data | single-shot | pheno | dem")->required();
    bm.add(build_model_cmd, false);
    build_model_cmd->add_option("--out", bm_out, "output DEM path ('-' for stdout)");
    build_model_cmd->add_flag("--merge", bm_merge, "merge equivalent columns");

    // decode
    auto* decode_cmd = app.add_subcommand("decode", "decode one syndrome");
    ModelOptions dm;
    DecoderOptions dd;
    std::string syndrome_path;
    std::string decode_out;
    dm.add(decode_cmd, true);
    dd.add(decode_cmd);
    decode_cmd->add_option("--syndrome", syndrome_path, "file of fired detector indices")->required();
    decode_cmd->add_option("--out", decode_out, "output JSON path");

    // simulate
    auto* simulate_cmd = app.add_subcommand("simulate", "Monte-Carlo logical error rate sweep");
    ModelOptions sm;
    DecoderOptions sd;
    std::uint64_t trials = 1000;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    std::optional<double> low_error_below;
    std::string sim_out;
    std::string sim_csv;
    sm.add(simulate_cmd, true);
    sd.add(simulate_cmd);
    simulate_cmd->add_option("--trials", trials)->capture_default_str();
    simulate_cmd->add_option("--seed", seed, "base seed; trial i uses seed + i")->capture_default_str();
    simulate_cmd->add_option("--threads", threads)->capture_default_str();
    simulate_cmd->add_option("--low-error-below", low_error_below, "use low-error mode at points with p_d <= value");
    simulate_cmd->add_option("--out", sim_out, "JSON report path (stdout if omitted)");
    simulate_cmd->add_option("--csv", sim_csv, "CSV report path");

    // analyze
    auto* analyze_cmd = app.add_subcommand("analyze", "syndrome-code counting and polynomial checks");
    analyze_cmd->require_subcommand(1);
    auto* counts_cmd = analyze_cmd->add_subcommand("counts", "low-weight syndrome configuration counts");
    std::string counts_code;
    counts_cmd->add_option("--code", counts_code, "code description file")->required();
    auto* gcd_cmd = analyze_cmd->add_subcommand("gcd", "gcd of two GF(2) polynomials and a divisibility test");
    std::string gcd_a = "0,15,20,28,66";
    std::string gcd_b = "0,58,59,100,121";
    std::vector<std::string> gcd_g = {"7,1,0", "7,5,3,1,0"};
    std::size_t gcd_ring = 127;
    gcd_cmd->add_option("--a", gcd_a, "exponents of a(x)")->capture_default_str();
    gcd_cmd->add_option("--b", gcd_b, "exponents of b(x)")->capture_default_str();
    gcd_cmd->add_option("--g", gcd_g, "exponents of each factor of g(x)");
    gcd_cmd->add_option("--ring", gcd_ring, "also reduce modulo x^n + 1 (0: off)")->capture_default_str();

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "per-window decoding latency");
    ModelOptions bnm;
    DecoderOptions bnd;
    std::uint64_t bench_trials = 100;
    std::uint64_t bench_seed = 1;
    std::string bench_out;
    bnm.add(bench_cmd, true);
    bnd.add(bench_cmd);
    bench_cmd->add_option("--trials", bench_trials)->capture_default_str();
    bench_cmd->add_option("--seed", bench_seed)->capture_default_str();
    bench_cmd->add_option("--out", bench_out, "JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        if (*build_code_cmd) {
            const CssCode code = load_code(bc_code);
            std::filesystem::create_directories(bc_out);
            auto dump = [&](const std::string& name, const SparseBitMatrix& m) {
                std::ostringstream buf;
                write_triplets(buf, m);
                write_output(bc_out + "/" + name, buf.str());
            };
            dump("hx.txt", code.hx);
            dump("hz.txt", code.hz);
            dump("lz.txt", code.lz);
            dump("lx.txt", code.lx);
            ordered_json j;
            j["n"] = code.n;
            j["k"] = code.k;
            if (code.distance) {
                j["d_claimed"] = *code.distance;
            }
            j["source"] = code.provenance;
            write_output(bc_out + "/manifest.json", j.dump(2) + "\n");
            std::cout << "[[" << code.n << "," << code.k << "]] written to " << bc_out << "\n";
        } else if (*build_model_cmd) {
            bm.kind = bm_kind;
            ExperimentConfig c;
            bm.fill(c);
            DetectorModel model = single_model(c);
            if (bm_merge) {
                model = merge_equivalent_columns(model).model;
            }
            write_output(bm_out, write_dem(model));
        } else if (*decode_cmd) {
            ExperimentConfig c;
            dm.fill(c);
            const DetectorModel model = single_model(c);
            const Bits s = read_syndrome(syndrome_path, model.n_detectors());
            const SlidingResult r = sliding_decode(model, s, dd.plan());
            ordered_json j;
            j["all_windows_success"] = r.all_windows_success;
            j["syndrome_satisfied"] = matvec(model.h(), r.estimate) == s;
            j["estimate"] = BitVector::from_dense(r.estimate).support();
            j["observables"] = BitVector::from_dense(matvec(model.observables(), r.estimate)).support();
            j["windows"] = windows_json(r);
            write_output(decode_out, j.dump(2) + "\n");
        } else if (*simulate_cmd) {
            ExperimentConfig c;
            sm.fill(c);
            c.plan = sd.plan();
            c.preset = sd.preset_label();
            c.trials = trials;
            c.base_seed = seed;
            c.threads = threads;
            c.low_error_below = low_error_below;
            const ExperimentReport report = run_experiment(c);
            write_output(sim_out, report_json(report));
            if (!sim_csv.empty()) {
                write_output(sim_csv, report_csv(report));
            }
        } else if (*counts_cmd) {
            const CssCode code = load_code(counts_code);
            const auto triples = enumerate_low_weight_syndrome_codewords(code.hx, 3, 3);
            ordered_json j;
            j["n"] = code.n;
            j["syndrome_pairs"] = count_weight2_syndrome_configs(code.hx);
            j["weight2_span_vectors"] = count_weight2_span_vectors(code.hx);
            j["weight2_column_pairs"] = triples.count(2, 2);
            j["weight3_triples"] = triples.count(3, 3);
            j["data_syndrome_triples"] = 9 * triples.count(3, 3);
            std::cout << j.dump(2) << "\n";
        } else if (*gcd_cmd) {
            const BitPoly a = BitPoly::from_exponents(parse_exponents(gcd_a));
            const BitPoly b = BitPoly::from_exponents(parse_exponents(gcd_b));
            BitPoly g = BitPoly::from_exponents({0});
            for (const auto& f : gcd_g) {
                g = g * BitPoly::from_exponents(parse_exponents(f));
            }
            const BitPoly plain = poly_gcd_gf2(a, b);
            ordered_json j;
            j["gcd"] = plain.to_string();
            j["g"] = g.to_string();
            j["g_divides_gcd"] = divides(g, plain);
            if (gcd_ring > 0) {
                const BitPoly cyclic = poly_gcd_gf2(plain, BitPoly::from_exponents({gcd_ring, 0}));
                j["gcd_mod_ring"] = cyclic.to_string();
                j["g_divides_gcd_mod_ring"] = divides(g, cyclic);
            }
            std::cout << j.dump(2) << "\n";
        } else if (*bench_cmd) {
            ExperimentConfig c;
            bnm.fill(c);
            const DetectorModel model = single_model(c);
            const auto lat = bench_windows(model, bnd.plan(), bench_trials, bench_seed);
            write_output(bench_out, latency_json(lat));
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::runtime_error& e) {
        // Library file-open failures surface as runtime_error.
        std::cerr << "error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }
    return 0;
}
