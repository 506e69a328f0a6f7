#pragma once

// Independent reference implementations used to check the library.

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "qgdg/gf2.hpp"
#include "qgdg/rng.hpp"

namespace oracle {

using Dense = std::vector<std::vector<std::uint8_t>>;

inline Dense to_dense(const qgdg::SparseBitMatrix& m) {
    Dense d(m.n_rows(), std::vector<std::uint8_t>(m.n_cols(), 0));
    for (auto [r, c] : m.triplets()) {
        d[r][c] = 1;
    }
    return d;
}

/// Textbook elimination on byte rows.
inline std::size_t rank(Dense d) {
    std::size_t rank = 0;
    const std::size_t cols = d.empty() ? 0 : d[0].size();
    for (std::size_t c = 0; c < cols && rank < d.size(); ++c) {
        std::size_t p = rank;
        while (p < d.size() && !d[p][c]) {
            ++p;
        }
        if (p == d.size()) {
            continue;
        }
        std::swap(d[p], d[rank]);
        for (std::size_t r = 0; r < d.size(); ++r) {
            if (r != rank && d[r][c]) {
                for (std::size_t k = 0; k < cols; ++k) {
                    d[r][k] ^= d[rank][k];
                }
            }
        }
        ++rank;
    }
    return rank;
}

inline std::vector<std::uint8_t> matvec(const Dense& d, const std::vector<std::uint8_t>& x) {
    std::vector<std::uint8_t> out(d.size(), 0);
    for (std::size_t r = 0; r < d.size(); ++r) {
        for (std::size_t c = 0; c < x.size(); ++c) {
            out[r] ^= static_cast<std::uint8_t>(d[r][c] & x[c]);
        }
    }
    return out;
}

inline qgdg::SparseBitMatrix random_matrix(qgdg::CounterRng& rng, std::size_t rows, std::size_t cols,
                                           double density) {
    std::vector<std::pair<qgdg::Index, qgdg::Index>> e;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (rng.uniform() < density) {
                e.emplace_back(static_cast<qgdg::Index>(r), static_cast<qgdg::Index>(c));
            }
        }
    }
    return qgdg::SparseBitMatrix::from_triplets(rows, cols, e);
}

struct MlResult {
    double pm = std::numeric_limits<double>::infinity();
    std::vector<std::uint8_t> x;
};

/// Minimum-weight (sum of LLRs) solution of H x = s over all 2^n vectors.
inline std::optional<MlResult> exhaustive_ml(const qgdg::SparseBitMatrix& h, const std::vector<double>& llrs,
                                             const std::vector<std::uint8_t>& s) {
    const std::size_t n = h.n_cols();
    std::vector<std::uint64_t> col_masks(n, 0);
    for (std::size_t c = 0; c < n; ++c) {
        for (auto r : h.col(c)) {
            col_masks[c] |= std::uint64_t{1} << r;
        }
    }
    std::uint64_t target = 0;
    for (std::size_t r = 0; r < s.size(); ++r) {
        if (s[r]) {
            target |= std::uint64_t{1} << r;
        }
    }
    std::optional<MlResult> best;
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
        std::uint64_t syn = 0;
        double pm = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
            if ((x >> c) & 1U) {
                syn ^= col_masks[c];
                pm += llrs[c];
            }
        }
        if (syn == target && (!best || pm < best->pm)) {
            best = MlResult{pm, {}};
            best->x.resize(n);
            for (std::size_t c = 0; c < n; ++c) {
                best->x[c] = (x >> c) & 1U;
            }
        }
    }
    return best;
}

}  // namespace oracle
