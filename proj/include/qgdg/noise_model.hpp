#pragma once

// Detector models: PCM over fault columns, priors, observables and round blocks.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qgdg/codes.hpp"
#include "qgdg/gf2.hpp"

namespace qgdg {

inline constexpr double kMinPrior = 1e-12;
inline constexpr double kMaxPrior = 0.5;

double clamp_prior(double p);

/// log((1 - p) / p); p must lie in (0, 0.5].
double prior_to_llr(double p);

/// Odd-parity combination of two independent flips.
inline double combine_priors(double p1, double p2) {
    return p1 * (1.0 - p2) + p2 * (1.0 - p1);
}

struct BlockStructure {
    std::size_t rounds = 0;
    std::size_t detectors_per_round = 0;
    bool operator==(const BlockStructure&) const = default;
};

/// Consecutive detector blocks touched by a column. Columns without detectors sit in block 0.
struct BlockSpan {
    std::size_t first = 0;
    std::size_t last = 0;
    bool operator==(const BlockSpan&) const = default;
};

class DetectorModel {
public:
    DetectorModel() = default;
    /// Validates priors, shapes and, when blocks are given, the two-consecutive-block rule.
    DetectorModel(SparseBitMatrix h, std::vector<double> priors, SparseBitMatrix observables,
                  std::optional<BlockStructure> blocks);

    [[nodiscard]] const SparseBitMatrix& h() const { return h_; }
    [[nodiscard]] const SparseBitMatrix& observables() const { return observables_; }
    [[nodiscard]] const std::vector<double>& priors() const { return priors_; }
    [[nodiscard]] const std::vector<double>& llrs() const { return llrs_; }
    [[nodiscard]] const std::optional<BlockStructure>& blocks() const { return blocks_; }
    [[nodiscard]] const std::vector<BlockSpan>& column_spans() const { return spans_; }

    [[nodiscard]] std::size_t n_detectors() const { return h_.n_rows(); }
    [[nodiscard]] std::size_t n_faults() const { return h_.n_cols(); }
    [[nodiscard]] std::size_t n_observables() const { return observables_.n_rows(); }
    /// Number of round blocks (1 when no block structure is attached).
    [[nodiscard]] std::size_t n_blocks() const { return blocks_ ? blocks_->rounds : 1; }
    [[nodiscard]] std::size_t detectors_per_block() const {
        return blocks_ ? blocks_->detectors_per_round : h_.n_rows();
    }

    bool operator==(const DetectorModel& other) const;

private:
    SparseBitMatrix h_;
    std::vector<double> priors_;
    std::vector<double> llrs_;
    SparseBitMatrix observables_;
    std::optional<BlockStructure> blocks_;
    std::vector<BlockSpan> spans_;
};

struct FaultSample {
    BitVector errors;
    BitVector detectors;
    BitVector observables;
    std::uint64_t seed = 0;
};

/// H = H_X, uniform prior p_d, observables L_Z, one block.
DetectorModel build_data_qubit_model(const CssCode& code, double p_d);

/// H = [H_X | I], data priors p_d, syndrome-flip priors p_s.
///
/// Observables are [L_Z | 0]; with `syndrome_observables` the rows [H_X | 0] are
/// appended so that a decoding counts as correct only if the denoised syndrome
/// (the data-error syndrome) is recovered as well.
DetectorModel build_single_shot_model(const CssCode& code, double p_d, double p_s, bool syndrome_observables = true);

/// R noisy rounds plus one noiseless final round: (R+1) blocks of w = rows(H_X) detectors.
/// Column order per round r: N data-fault columns (epoch r), then w measurement-fault
/// columns spanning blocks r and r+1.
DetectorModel build_phenomenological_model(const CssCode& code, std::size_t rounds, double p_d, double p_s);

class DemParseError : public std::invalid_argument {
public:
    DemParseError(std::size_t line, const std::string& message)
        : std::invalid_argument("line " + std::to_string(line) + ": " + message), line_(line) {}
    [[nodiscard]] std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Line-oriented text: "detectors D", "logicals K", optional "rounds R w",
/// then "error p D.. L.." per fault column. '#' starts a comment.
DetectorModel parse_dem(std::string_view text);
/// Canonical serialization (shortest round-trip decimal priors, no comments).
std::string write_dem(const DetectorModel& model);

struct MergeResult {
    DetectorModel model;
    /// original column -> merged column
    std::vector<Index> column_map;
};

/// Merges columns with identical (detector, observable) supports; priors combine by odd parity.
MergeResult merge_equivalent_columns(const DetectorModel& model);

/// Independent Bernoulli faults from CounterRng(seed): one uniform draw per column in order.
FaultSample sample(const DetectorModel& model, std::uint64_t seed);

}  // namespace qgdg
