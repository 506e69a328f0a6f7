#include "qgdg/noise_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "qgdg/rng.hpp"

namespace qgdg {

double clamp_prior(double p) {
    if (std::isnan(p)) {
        throw ContractError("prior is NaN");
    }
    return std::clamp(p, kMinPrior, kMaxPrior);
}

double prior_to_llr(double p) {
    if (!(p > 0.0 && p <= 0.5)) {
        throw ContractError("prior_to_llr: probability must lie in (0, 0.5]");
    }
    return std::log((1.0 - p) / p);
}

// ---------------------------------------------------------------------------
// DetectorModel

DetectorModel::DetectorModel(SparseBitMatrix h, std::vector<double> priors, SparseBitMatrix observables,
                             std::optional<BlockStructure> blocks)
    : h_(std::move(h)), priors_(std::move(priors)), observables_(std::move(observables)), blocks_(blocks) {
    if (priors_.size() != h_.n_cols()) {
        throw ContractError("DetectorModel: one prior per column required");
    }
    if (observables_.n_cols() != h_.n_cols()) {
        throw ContractError("DetectorModel: observable matrix column count differs from H");
    }
    llrs_.reserve(priors_.size());
    for (double p : priors_) {
        if (!(p > 0.0 && p <= 0.5)) {
            throw ContractError("DetectorModel: prior outside (0, 0.5]");
        }
        llrs_.push_back(prior_to_llr(p));
    }
    std::size_t w = h_.n_rows();
    if (blocks_) {
        if (blocks_->rounds == 0 || blocks_->detectors_per_round == 0 ||
            blocks_->rounds * blocks_->detectors_per_round != h_.n_rows()) {
            throw ContractError("DetectorModel: detector count must equal rounds * detectors_per_round");
        }
        w = blocks_->detectors_per_round;
    }
    spans_.resize(h_.n_cols());
    for (std::size_t c = 0; c < h_.n_cols(); ++c) {
        auto rows = h_.col(c);
        if (rows.empty() || w == 0) {
            continue;
        }
        BlockSpan span{rows.front() / w, rows.back() / w};
        if (span.last > span.first + 1) {
            throw ContractError("DetectorModel: column " + std::to_string(c) + " touches blocks " +
                                std::to_string(span.first) + ".." + std::to_string(span.last) +
                                " (more than two consecutive rounds)");
        }
        spans_[c] = span;
    }
}

bool DetectorModel::operator==(const DetectorModel& other) const {
    return h_ == other.h_ && priors_ == other.priors_ && observables_ == other.observables_ &&
           blocks_ == other.blocks_;
}

// ---------------------------------------------------------------------------
// Builders

DetectorModel build_data_qubit_model(const CssCode& code, double p_d) {
    const double p = clamp_prior(p_d);
    return DetectorModel(code.hx, std::vector<double>(code.n, p), code.lz,
                         BlockStructure{1, code.hx.n_rows()});
}

DetectorModel build_single_shot_model(const CssCode& code, double p_d, double p_s, bool syndrome_observables) {
    const std::size_t w = code.hx.n_rows();
    SparseBitMatrix h = SparseBitMatrix::hstack(code.hx, SparseBitMatrix::identity(w));
    std::vector<double> priors(code.n, clamp_prior(p_d));
    priors.resize(code.n + w, clamp_prior(p_s));
    SparseBitMatrix obs = code.lz;
    if (syndrome_observables) {
        obs = SparseBitMatrix::vstack(obs, code.hx);
    }
    obs = SparseBitMatrix::hstack(obs, SparseBitMatrix(obs.n_rows(), w));
    return DetectorModel(std::move(h), std::move(priors), std::move(obs), BlockStructure{1, w});
}

DetectorModel build_phenomenological_model(const CssCode& code, std::size_t rounds, double p_d, double p_s) {
    if (rounds == 0) {
        throw ContractError("build_phenomenological_model: rounds must be >= 1");
    }
    const std::size_t w = code.hx.n_rows();
    const std::size_t n = code.n;
    const std::size_t per_round = n + w;
    const std::size_t n_cols = rounds * per_round;
    const double pd = clamp_prior(p_d);
    const double ps = clamp_prior(p_s);

    std::vector<std::pair<Index, Index>> h_entries;
    std::vector<std::pair<Index, Index>> l_entries;
    std::vector<double> priors;
    priors.reserve(n_cols);
    for (std::size_t r = 0; r < rounds; ++r) {
        const std::size_t col0 = r * per_round;
        const std::size_t row0 = r * w;
        for (std::size_t q = 0; q < n; ++q) {
            const auto col = static_cast<Index>(col0 + q);
            for (Index check : code.hx.col(q)) {
                h_entries.emplace_back(static_cast<Index>(row0 + check), col);
            }
            for (Index logical : code.lz.col(q)) {
                l_entries.emplace_back(logical, col);
            }
            priors.push_back(pd);
        }
        for (std::size_t check = 0; check < w; ++check) {
            const auto col = static_cast<Index>(col0 + n + check);
            h_entries.emplace_back(static_cast<Index>(row0 + check), col);
            h_entries.emplace_back(static_cast<Index>(row0 + w + check), col);
            priors.push_back(ps);
        }
    }
    return DetectorModel(SparseBitMatrix::from_triplets((rounds + 1) * w, n_cols, h_entries), std::move(priors),
                         SparseBitMatrix::from_triplets(code.lz.n_rows(), n_cols, l_entries),
                         BlockStructure{rounds + 1, w});
}

// ---------------------------------------------------------------------------
// DEM text

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
            ++i;
        }
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') {
            ++j;
        }
        if (j > i) {
            out.push_back(line.substr(i, j - i));
        }
        i = j;
    }
    return out;
}

std::size_t parse_count(std::string_view tok, std::size_t line, const char* what) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw DemParseError(line, std::string("invalid ") + what + " '" + std::string(tok) + "'");
    }
    return v;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

DetectorModel parse_dem(std::string_view text) {
    std::optional<std::size_t> detectors;
    std::optional<std::size_t> logicals;
    std::optional<BlockStructure> blocks;
    std::vector<std::pair<Index, Index>> h_entries;
    std::vector<std::pair<Index, Index>> l_entries;
    std::vector<double> priors;
    std::vector<std::size_t> column_line;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        auto tokens = split_ws(line);
        if (tokens.empty()) {
            if (end == text.size()) {
                break;
            }
            continue;
        }
        const std::string_view kw = tokens[0];
        if (!detectors) {
            if (kw != "detectors" || tokens.size() != 2) {
                throw DemParseError(line_no, "expected 'detectors <D>'");
            }
            detectors = parse_count(tokens[1], line_no, "detector count");
        } else if (!logicals) {
            if (kw != "logicals" || tokens.size() != 2) {
                throw DemParseError(line_no, "expected 'logicals <K>'");
            }
            logicals = parse_count(tokens[1], line_no, "logical count");
        } else if (kw == "rounds") {
            if (blocks || !priors.empty() || tokens.size() != 3) {
                throw DemParseError(line_no, "'rounds <R> <w>' must appear once, before any error line");
            }
            BlockStructure b{parse_count(tokens[1], line_no, "round count"),
                             parse_count(tokens[2], line_no, "detectors per round")};
            if (b.rounds == 0 || b.detectors_per_round == 0 || b.rounds * b.detectors_per_round != *detectors) {
                throw DemParseError(line_no, "rounds * w must equal the detector count");
            }
            blocks = b;
        } else if (kw == "error") {
            if (tokens.size() < 2) {
                throw DemParseError(line_no, "error line needs a probability");
            }
            double p = 0.0;
            auto [ptr, ec] = std::from_chars(tokens[1].data(), tokens[1].data() + tokens[1].size(), p);
            if (ec != std::errc{} || ptr != tokens[1].data() + tokens[1].size()) {
                throw DemParseError(line_no, "invalid probability '" + std::string(tokens[1]) + "'");
            }
            if (!(p > 0.0 && p <= 0.5)) {
                throw DemParseError(line_no, "probability " + std::string(tokens[1]) + " outside (0, 0.5]");
            }
            const auto col = static_cast<Index>(priors.size());
            long last_d = -1;
            long last_l = -1;
            bool seen_l = false;
            for (std::size_t t = 2; t < tokens.size(); ++t) {
                std::string_view tok = tokens[t];
                if (tok.size() < 2 || (tok[0] != 'D' && tok[0] != 'L')) {
                    throw DemParseError(line_no, "expected D<i> or L<k>, got '" + std::string(tok) + "'");
                }
                const std::size_t idx = parse_count(tok.substr(1), line_no, "target index");
                if (tok[0] == 'D') {
                    if (seen_l) {
                        throw DemParseError(line_no, "detector targets must precede logical targets");
                    }
                    if (idx >= *detectors) {
                        throw DemParseError(line_no, "detector index " + std::to_string(idx) + " out of range");
                    }
                    if (static_cast<long>(idx) <= last_d) {
                        throw DemParseError(line_no, "detector indices must be strictly increasing");
                    }
                    last_d = static_cast<long>(idx);
                    h_entries.emplace_back(static_cast<Index>(idx), col);
                } else {
                    seen_l = true;
                    if (idx >= *logicals) {
                        throw DemParseError(line_no, "logical index " + std::to_string(idx) + " out of range");
                    }
                    if (static_cast<long>(idx) <= last_l) {
                        throw DemParseError(line_no, "logical indices must be strictly increasing");
                    }
                    last_l = static_cast<long>(idx);
                    l_entries.emplace_back(static_cast<Index>(idx), col);
                }
            }
            priors.push_back(p);
            column_line.push_back(line_no);
        } else {
            throw DemParseError(line_no, "unknown directive '" + std::string(kw) + "'");
        }
        if (end == text.size()) {
            break;
        }
    }
    if (!detectors || !logicals) {
        throw DemParseError(line_no, "missing 'detectors' or 'logicals' header");
    }
    const std::size_t n = priors.size();
    SparseBitMatrix h = SparseBitMatrix::from_triplets(*detectors, n, h_entries);
    if (blocks) {
        const std::size_t w = blocks->detectors_per_round;
        for (std::size_t c = 0; c < n; ++c) {
            auto rows = h.col(c);
            if (!rows.empty() && rows.back() / w > rows.front() / w + 1) {
                throw DemParseError(column_line[c], "fault spans more than two consecutive rounds");
            }
        }
    }
    return DetectorModel(std::move(h), std::move(priors), SparseBitMatrix::from_triplets(*logicals, n, l_entries),
                         blocks);
}

std::string write_dem(const DetectorModel& model) {
    std::string out;
    out += "detectors " + std::to_string(model.n_detectors()) + "\n";
    out += "logicals " + std::to_string(model.n_observables()) + "\n";
    if (model.blocks()) {
        out += "rounds " + std::to_string(model.blocks()->rounds) + " " +
               std::to_string(model.blocks()->detectors_per_round) + "\n";
    }
    for (std::size_t c = 0; c < model.n_faults(); ++c) {
        out += "error " + format_double(model.priors()[c]);
        for (Index d : model.h().col(c)) {
            out += " D" + std::to_string(d);
        }
        for (Index l : model.observables().col(c)) {
            out += " L" + std::to_string(l);
        }
        out += "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------

MergeResult merge_equivalent_columns(const DetectorModel& model) {
    using Key = std::pair<std::vector<Index>, std::vector<Index>>;
    std::map<Key, Index> seen;
    std::vector<std::vector<Index>> det_cols;
    std::vector<std::vector<Index>> obs_cols;
    std::vector<double> priors;
    MergeResult result;
    result.column_map.resize(model.n_faults());
    for (std::size_t c = 0; c < model.n_faults(); ++c) {
        Key key{{model.h().col(c).begin(), model.h().col(c).end()},
                {model.observables().col(c).begin(), model.observables().col(c).end()}};
        auto [it, inserted] = seen.try_emplace(key, static_cast<Index>(priors.size()));
        if (inserted) {
            det_cols.push_back(key.first);
            obs_cols.push_back(key.second);
            priors.push_back(model.priors()[c]);
        } else {
            double& p = priors[it->second];
            p = clamp_prior(combine_priors(p, model.priors()[c]));
        }
        result.column_map[c] = it->second;
    }
    result.model = DetectorModel(SparseBitMatrix::from_columns(model.n_detectors(), det_cols), std::move(priors),
                                 SparseBitMatrix::from_columns(model.n_observables(), obs_cols), model.blocks());
    return result;
}

FaultSample sample(const DetectorModel& model, std::uint64_t seed) {
    CounterRng rng(seed);
    std::vector<Index> support;
    const auto& priors = model.priors();
    for (std::size_t c = 0; c < priors.size(); ++c) {
        if (rng.uniform() < priors[c]) {
            support.push_back(static_cast<Index>(c));
        }
    }
    FaultSample s;
    s.errors = BitVector(model.n_faults(), std::move(support));
    s.detectors = matvec(model.h(), s.errors);
    s.observables = matvec(model.observables(), s.errors);
    s.seed = seed;
    return s;
}

}  // namespace qgdg
