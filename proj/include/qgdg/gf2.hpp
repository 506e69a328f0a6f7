#pragma once

// Sparse and dense linear algebra over GF(2).

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qgdg {

using Index = std::uint32_t;

/// Dense 0/1 vector used inside the decoding kernels.
using Bits = std::vector<std::uint8_t>;

/// Raised when a caller violates a documented precondition.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Binary vector stored by its support (sorted, strictly increasing).
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t length) : length_(length) {}
    BitVector(std::size_t length, std::vector<Index> support);

    static BitVector from_dense(std::span<const std::uint8_t> dense);
    [[nodiscard]] Bits to_dense() const;

    [[nodiscard]] std::size_t size() const { return length_; }
    [[nodiscard]] std::size_t weight() const { return support_.size(); }
    [[nodiscard]] bool empty() const { return support_.empty(); }
    [[nodiscard]] const std::vector<Index>& support() const { return support_; }
    [[nodiscard]] bool test(Index i) const;

    BitVector operator^(const BitVector& other) const;
    bool operator==(const BitVector&) const = default;

private:
    std::size_t length_ = 0;
    std::vector<Index> support_;
};

/// Sparse binary matrix with row-major and column-major adjacency kept in sync.
class SparseBitMatrix {
public:
    SparseBitMatrix() = default;
    SparseBitMatrix(std::size_t n_rows, std::size_t n_cols);

    /// Entries are (row, col) pairs; duplicates and out-of-range indices are rejected.
    static SparseBitMatrix from_triplets(std::size_t n_rows, std::size_t n_cols,
                                         std::span<const std::pair<Index, Index>> entries);
    static SparseBitMatrix from_columns(std::size_t n_rows, const std::vector<std::vector<Index>>& columns);
    static SparseBitMatrix from_rows(std::size_t n_cols, const std::vector<std::vector<Index>>& rows);
    static SparseBitMatrix identity(std::size_t n);

    [[nodiscard]] std::size_t n_rows() const { return n_rows_; }
    [[nodiscard]] std::size_t n_cols() const { return n_cols_; }
    [[nodiscard]] std::size_t nnz() const { return nnz_; }

    [[nodiscard]] std::span<const Index> row(std::size_t r) const { return rows_[r]; }
    [[nodiscard]] std::span<const Index> col(std::size_t c) const { return cols_[c]; }
    [[nodiscard]] std::size_t row_weight(std::size_t r) const { return rows_[r].size(); }
    [[nodiscard]] std::size_t col_weight(std::size_t c) const { return cols_[c].size(); }
    [[nodiscard]] bool test(std::size_t r, std::size_t c) const;

    /// Sorted (row, col) list.
    [[nodiscard]] std::vector<std::pair<Index, Index>> triplets() const;

    [[nodiscard]] SparseBitMatrix transpose() const;
    [[nodiscard]] SparseBitMatrix select_columns(std::span<const Index> columns) const;
    [[nodiscard]] SparseBitMatrix select_rows(std::span<const Index> rows) const;
    [[nodiscard]] static SparseBitMatrix hstack(const SparseBitMatrix& left, const SparseBitMatrix& right);
    [[nodiscard]] static SparseBitMatrix vstack(const SparseBitMatrix& top, const SparseBitMatrix& bottom);

    /// Throws ContractError if the two adjacency views disagree.
    void check_invariants() const;

    bool operator==(const SparseBitMatrix& other) const;

private:
    void rebuild_columns();

    std::size_t n_rows_ = 0;
    std::size_t n_cols_ = 0;
    std::size_t nnz_ = 0;
    std::vector<std::vector<Index>> rows_;
    std::vector<std::vector<Index>> cols_;
};

Bits matvec(const SparseBitMatrix& m, std::span<const std::uint8_t> v);
BitVector matvec(const SparseBitMatrix& m, const BitVector& v);

/// Product of two sparse matrices over GF(2).
SparseBitMatrix multiply(const SparseBitMatrix& a, const SparseBitMatrix& b);

/// Row-packed dense binary matrix.
class DenseBitMatrix {
public:
    DenseBitMatrix() = default;
    DenseBitMatrix(std::size_t n_rows, std::size_t n_cols);
    static DenseBitMatrix from_sparse(const SparseBitMatrix& m);

    [[nodiscard]] std::size_t n_rows() const { return n_rows_; }
    [[nodiscard]] std::size_t n_cols() const { return n_cols_; }
    [[nodiscard]] std::size_t words_per_row() const { return words_; }

    [[nodiscard]] bool test(std::size_t r, std::size_t c) const {
        return (data_[r * words_ + c / 64] >> (c % 64)) & 1U;
    }
    void set(std::size_t r, std::size_t c) { data_[r * words_ + c / 64] |= (std::uint64_t{1} << (c % 64)); }
    void flip(std::size_t r, std::size_t c) { data_[r * words_ + c / 64] ^= (std::uint64_t{1} << (c % 64)); }

    std::span<std::uint64_t> row_words(std::size_t r) { return {data_.data() + r * words_, words_}; }
    [[nodiscard]] std::span<const std::uint64_t> row_words(std::size_t r) const {
        return {data_.data() + r * words_, words_};
    }
    void xor_row(std::size_t dst, std::size_t src);
    void swap_rows(std::size_t a, std::size_t b);

private:
    std::size_t n_rows_ = 0;
    std::size_t n_cols_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> data_;
};

/// Result of Gauss-Jordan elimination scanning columns in a caller-chosen order.
///
/// After elimination, row k < rank of `reduced` has a one in pivot_columns[k] and
/// zeros in every other pivot column. `transform` records the row operations, so
/// transform * M == reduced.
struct Elimination {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<Index> pivot_columns;
    DenseBitMatrix reduced;
    DenseBitMatrix transform;

    [[nodiscard]] std::size_t rank() const { return pivot_columns.size(); }

    /// Solution supported on pivot columns, or nullopt when s lies outside their span.
    [[nodiscard]] std::optional<Bits> solve(std::span<const std::uint8_t> s) const;

    /// Pivot-coordinate representation T*s; entries >= rank must vanish for s to be in span.
    [[nodiscard]] std::vector<std::uint64_t> transformed(std::span<const std::uint8_t> s) const;
};

/// Gauss-Jordan elimination over columns in `column_order` (a permutation of all
/// columns). Lowest row index wins pivot ties. Scanning stops once the rank equals
/// the row count unless `full_scan` is set.
Elimination row_reduce(const SparseBitMatrix& m, std::span<const Index> column_order, bool full_scan = false);
Elimination row_reduce(const SparseBitMatrix& m);

std::size_t rank(const SparseBitMatrix& m);
std::vector<BitVector> kernel_basis(const SparseBitMatrix& m);

/// x supported on the pivot columns of `elimination` with m*x = s, or nullopt.
std::optional<BitVector> solve_in_span(const SparseBitMatrix& m, const BitVector& s, const Elimination& elimination);

/// Incrementally grown row basis in echelon form; used for independence tests.
class IncrementalBasis {
public:
    explicit IncrementalBasis(std::size_t n_cols);

    /// Adds v if it is independent of the current basis; returns true when added.
    bool insert(std::span<const std::uint8_t> v);
    bool insert(const BitVector& v);
    [[nodiscard]] bool contains(const BitVector& v) const;
    [[nodiscard]] std::size_t rank() const { return pivots_.size(); }

private:
    [[nodiscard]] std::vector<std::uint64_t> pack(const BitVector& v) const;
    void reduce(std::vector<std::uint64_t>& w) const;
    bool insert_packed(std::vector<std::uint64_t> w);

    std::size_t n_cols_;
    std::size_t words_;
    std::vector<std::vector<std::uint64_t>> rows_;
    std::vector<std::size_t> pivots_;
};

/// Text triplet format: header "rows cols nnz", then one "r c" pair per line.
void write_triplets(std::ostream& out, const SparseBitMatrix& m);
SparseBitMatrix read_triplets(std::istream& in);

}  // namespace qgdg
