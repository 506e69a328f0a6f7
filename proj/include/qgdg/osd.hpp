#pragma once

// Ordered statistics post-processing: OSD-0 and the combination sweep OSD-CS.

#include <optional>
#include <span>
#include <vector>

#include "qgdg/bp.hpp"
#include "qgdg/gf2.hpp"

namespace qgdg {

/// Ascending stable order of scores: most likely flips first, ties by lowest index.
std::vector<Index> rank_columns(std::span<const double> scores);

/// Ranking scores from a BP state: last-4 posterior sums, or the latest posterior
/// when the history is not yet full or `latest_only` is set.
std::vector<double> ranking_scores(const BpState& state, bool latest_only = false);

struct OsdResult {
    Bits estimate;
    PathMetric pm;
};

/// Solution supported on the pivots of `column_order`; nullopt when s is outside the column span.
std::optional<OsdResult> osd0(const SparseBitMatrix& h, std::span<const std::uint8_t> s,
                              std::span<const Index> column_order, std::span<const double> llrs);

/// Minimum path metric among OSD-0, every weight-1 non-pivot flip and every pair among
/// the first `order` non-pivots (all in ranked order, first strict improvement wins).
/// With `restrict_to`, only non-pivots within the first restrict_to ranked positions are swept.
std::optional<OsdResult> osd_cs(const SparseBitMatrix& h, std::span<const std::uint8_t> s,
                                std::span<const Index> column_order, std::span<const double> llrs, std::size_t order,
                                std::optional<std::size_t> restrict_to = std::nullopt);

enum class OsdMethod { Osd0, OsdCs };

struct OsdConfig {
    OsdMethod method = OsdMethod::OsdCs;
    std::size_t order = 10;
    std::size_t bp_iterations = 200;
    double scale = 1.0;
    std::optional<std::size_t> restrict_to;
    bool latest_posterior_ranking = false;
};

struct BpOsdResult {
    Bits estimate;
    PathMetric pm;
    bool bp_converged = false;
    std::size_t bp_iterations = 0;
    bool success = false;
};

/// BP with early stop; on non-convergence, OSD over the BP ranking.
BpOsdResult bp_osd_decode(const SparseBitMatrix& h, std::span<const double> llrs, std::span<const std::uint8_t> s,
                          const OsdConfig& config);

}  // namespace qgdg
