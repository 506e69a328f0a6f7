#pragma once

// (W,F) sliding-window decoding over a round-blocked detector model.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qgdg/gdg.hpp"
#include "qgdg/noise_model.hpp"
#include "qgdg/osd.hpp"

namespace qgdg {

enum class DecoderKind { Gdg, Osd0, OsdCs };

struct InnerDecoder {
    DecoderKind kind = DecoderKind::Gdg;
    DecisionTreeConfig gdg;
    OsdConfig osd;
};

std::string decoder_name(DecoderKind kind);
DecoderKind parse_decoder_kind(const std::string& name);

struct InnerResult {
    bool success = false;
    Bits estimate;
    PathMetric pm;
    std::size_t iterations = 0;
};

InnerResult decode_inner(const SparseBitMatrix& h, std::span<const double> llrs, std::span<const std::uint8_t> s,
                         const InnerDecoder& decoder);

struct WindowPlan {
    std::size_t window = 3;
    std::size_t step = 1;
    InnerDecoder inner;
    std::optional<InnerDecoder> last_window_override;
    /// Replace weight-one tail columns of each non-final window by one identity column per row.
    bool merge_tail = false;
};

struct WindowView {
    std::size_t start_block = 0;
    std::size_t end_block = 0;
    std::size_t first_row = 0;
    SparseBitMatrix h;
    std::vector<double> priors;
    /// window column -> model column; kNoColumn for merged tail columns.
    std::vector<Index> columns;
    /// model columns committed by this window
    std::vector<Index> commit_columns;
};

inline constexpr Index kNoColumn = static_cast<Index>(-1);

/// Rows of blocks [start, end), columns whose span starts in that range. With
/// `commit_all` every column is committed, otherwise those starting before start + step.
WindowView window_view(const DetectorModel& model, std::size_t start_block, std::size_t end_block,
                       std::size_t step, bool commit_all, bool merge_tail = false);

struct WindowDiagnostics {
    std::size_t start_block = 0;
    std::size_t end_block = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    bool success = false;
    PathMetric pm;
    std::size_t iterations = 0;
    std::size_t committed_ones = 0;
    double elapsed_us = 0.0;
};

struct SlidingResult {
    Bits estimate;
    std::vector<WindowDiagnostics> windows;
    bool all_windows_success = true;
};

/// Window start blocks 0, F, 2F, ... while start + W < blocks; the final window is
/// [start, blocks) and commits everything.
std::vector<std::pair<std::size_t, std::size_t>> window_ranges(std::size_t blocks, std::size_t window,
                                                               std::size_t step);

SlidingResult sliding_decode(const DetectorModel& model, std::span<const std::uint8_t> syndrome,
                             const WindowPlan& plan);

enum class Outcome { Success, SyndromeFailure, LogicalFailure };

std::string outcome_name(Outcome o);

Outcome judge(const DetectorModel& model, std::span<const std::uint8_t> estimate, const FaultSample& sample);

}  // namespace qgdg
