#pragma once

// Bivariate bicycle codes and syndrome-code analyses.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qgdg/gf2.hpp"

namespace qgdg {

/// Element of F2[x,y]/(x^l - 1, y^m - 1).
class BivariatePoly {
public:
    BivariatePoly(std::size_t l, std::size_t m) : l_(l), m_(m) {}
    BivariatePoly(std::size_t l, std::size_t m, const std::vector<std::pair<std::size_t, std::size_t>>& monomials);

    /// Parses "x^3 + y^2 + y^7", "x*y^2", "1". Repeated monomials cancel in pairs.
    static BivariatePoly parse(std::size_t l, std::size_t m, const std::string& text);

    [[nodiscard]] std::size_t l() const { return l_; }
    [[nodiscard]] std::size_t m() const { return m_; }
    [[nodiscard]] const std::set<std::pair<std::size_t, std::size_t>>& monomials() const { return monomials_; }
    [[nodiscard]] std::string to_string() const;

    /// Adds a monomial over GF(2) (toggles it).
    void toggle(std::size_t a, std::size_t b);

private:
    std::size_t l_;
    std::size_t m_;
    std::set<std::pair<std::size_t, std::size_t>> monomials_;
};

/// (lm) x (lm) matrix sum of S_l^a (x) S_m^b over monomials, with S the cyclic
/// shift S[i][i+1 mod n] = 1. Index of (i, j) is i*m + j.
SparseBitMatrix circulant_matrix(const BivariatePoly& poly);

struct CssCode {
    std::size_t n = 0;
    std::size_t k = 0;
    std::optional<std::size_t> distance;  // claimed, never computed
    SparseBitMatrix hx;
    SparseBitMatrix hz;
    /// Observable rows for errors detected by hx: in ker(hz), independent modulo rowspace(hx).
    SparseBitMatrix lz;
    /// Nontrivial undetectable error patterns: in ker(hx), independent modulo rowspace(hz).
    SparseBitMatrix lx;
    std::string provenance;
};

/// H_X = [A|B], H_Z = [B^T|A^T].
CssCode build_bb_code(const BivariatePoly& a, const BivariatePoly& b);

/// K = n - rank(h) - rank(other) rows spanning ker(h) / rowspace(other).
SparseBitMatrix logical_basis(const SparseBitMatrix& h, const SparseBitMatrix& other);

/// Code description text: "l m", "a: <poly>", "b: <poly>", optional "d: <int>".
struct CodeDescription {
    std::size_t l = 0;
    std::size_t m = 0;
    std::string a;
    std::string b;
    std::optional<std::size_t> distance;
};
CodeDescription parse_code_description(std::istream& in);
CssCode build_code(const CodeDescription& description);

// --- syndrome-code counting ------------------------------------------------

/// Sum over columns of C(weight, 2).
std::uint64_t count_weight2_syndrome_configs(const SparseBitMatrix& h);

struct LowWeightCombination {
    std::vector<Index> columns;
    std::size_t weight;
};

struct LowWeightEnumeration {
    std::vector<LowWeightCombination> combinations;
    /// count_by_size_weight[s][w] = number of s-column subsets with XOR weight w.
    std::vector<std::vector<std::uint64_t>> count_by_size_weight;

    [[nodiscard]] std::uint64_t count(std::size_t size, std::size_t weight) const;
};

/// Brute-force enumeration of column subsets of size <= max_columns (<= 3) whose XOR
/// has weight in [1, max_weight]. Refuses matrices too large for the requested size.
LowWeightEnumeration enumerate_low_weight_syndrome_codewords(const SparseBitMatrix& h, std::size_t max_columns,
                                                             std::size_t max_weight);

inline constexpr std::size_t kMaxColumnsForTriples = 600;
inline constexpr std::size_t kMaxColumnsForPairs = 20000;

/// Number of weight-2 vectors in the column span of h (any number of columns).
std::uint64_t count_weight2_span_vectors(const SparseBitMatrix& h);

/// Data-error + two-syndrome-flip configurations: 9 per weight-3 triple codeword.
std::uint64_t config_b_coefficient(const SparseBitMatrix& h);

// --- univariate polynomials over GF(2) -----------------------------------------

class BitPoly {
public:
    BitPoly() = default;
    static BitPoly from_exponents(const std::vector<std::size_t>& exponents);

    [[nodiscard]] bool is_zero() const { return words_.empty(); }
    /// -1 for the zero polynomial.
    [[nodiscard]] long degree() const;
    [[nodiscard]] bool coefficient(std::size_t i) const;
    [[nodiscard]] std::vector<std::size_t> exponents() const;
    [[nodiscard]] std::string to_string() const;

    BitPoly operator+(const BitPoly& o) const;
    BitPoly operator*(const BitPoly& o) const;
    [[nodiscard]] BitPoly mod(const BitPoly& divisor) const;
    bool operator==(const BitPoly& o) const = default;

private:
    void toggle(std::size_t i);
    void trim();
    std::vector<std::uint64_t> words_;
};

BitPoly poly_gcd_gf2(const BitPoly& a, const BitPoly& b);
bool divides(const BitPoly& g, const BitPoly& h);

}  // namespace qgdg
