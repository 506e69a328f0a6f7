#include "qgdg/gf2.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace qgdg {

// ---------------------------------------------------------------------------
// BitVector

BitVector::BitVector(std::size_t length, std::vector<Index> support)
    : length_(length), support_(std::move(support)) {
    for (std::size_t k = 0; k < support_.size(); ++k) {
        if (support_[k] >= length_) {
            throw ContractError("BitVector index " + std::to_string(support_[k]) + " out of range " +
                                std::to_string(length_));
        }
        if (k > 0 && support_[k] <= support_[k - 1]) {
            throw ContractError("BitVector support must be strictly increasing");
        }
    }
}

BitVector BitVector::from_dense(std::span<const std::uint8_t> dense) {
    BitVector v(dense.size());
    for (std::size_t i = 0; i < dense.size(); ++i) {
        if (dense[i] & 1U) {
            v.support_.push_back(static_cast<Index>(i));
        }
    }
    return v;
}

Bits BitVector::to_dense() const {
    Bits out(length_, 0);
    for (Index i : support_) {
        out[i] = 1;
    }
    return out;
}

bool BitVector::test(Index i) const {
    return std::binary_search(support_.begin(), support_.end(), i);
}

BitVector BitVector::operator^(const BitVector& other) const {
    if (other.length_ != length_) {
        throw ContractError("BitVector xor: length mismatch");
    }
    BitVector out(length_);
    std::set_symmetric_difference(support_.begin(), support_.end(), other.support_.begin(),
                                  other.support_.end(), std::back_inserter(out.support_));
    return out;
}

// ---------------------------------------------------------------------------
// SparseBitMatrix

SparseBitMatrix::SparseBitMatrix(std::size_t n_rows, std::size_t n_cols)
    : n_rows_(n_rows), n_cols_(n_cols), rows_(n_rows), cols_(n_cols) {}

SparseBitMatrix SparseBitMatrix::from_triplets(std::size_t n_rows, std::size_t n_cols,
                                               std::span<const std::pair<Index, Index>> entries) {
    SparseBitMatrix m(n_rows, n_cols);
    for (const auto& [r, c] : entries) {
        if (r >= n_rows || c >= n_cols) {
            throw ContractError("triplet (" + std::to_string(r) + ", " + std::to_string(c) +
                                ") out of range for " + std::to_string(n_rows) + "x" + std::to_string(n_cols));
        }
        m.rows_[r].push_back(c);
    }
    for (auto& row : m.rows_) {
        std::sort(row.begin(), row.end());
        if (std::adjacent_find(row.begin(), row.end()) != row.end()) {
            throw ContractError("duplicate entry in triplet list");
        }
    }
    m.rebuild_columns();
    return m;
}

SparseBitMatrix SparseBitMatrix::from_columns(std::size_t n_rows, const std::vector<std::vector<Index>>& columns) {
    std::vector<std::pair<Index, Index>> entries;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        for (Index r : columns[c]) {
            entries.emplace_back(r, static_cast<Index>(c));
        }
    }
    return from_triplets(n_rows, columns.size(), entries);
}

SparseBitMatrix SparseBitMatrix::from_rows(std::size_t n_cols, const std::vector<std::vector<Index>>& rows) {
    std::vector<std::pair<Index, Index>> entries;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (Index c : rows[r]) {
            entries.emplace_back(static_cast<Index>(r), c);
        }
    }
    return from_triplets(rows.size(), n_cols, entries);
}

SparseBitMatrix SparseBitMatrix::identity(std::size_t n) {
    SparseBitMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m.rows_[i].push_back(static_cast<Index>(i));
    }
    m.rebuild_columns();
    return m;
}

void SparseBitMatrix::rebuild_columns() {
    cols_.assign(n_cols_, {});
    nnz_ = 0;
    for (std::size_t r = 0; r < n_rows_; ++r) {
        for (Index c : rows_[r]) {
            cols_[c].push_back(static_cast<Index>(r));
        }
        nnz_ += rows_[r].size();
    }
}

bool SparseBitMatrix::test(std::size_t r, std::size_t c) const {
    const auto& row = rows_[r];
    return std::binary_search(row.begin(), row.end(), static_cast<Index>(c));
}

std::vector<std::pair<Index, Index>> SparseBitMatrix::triplets() const {
    std::vector<std::pair<Index, Index>> out;
    out.reserve(nnz_);
    for (std::size_t r = 0; r < n_rows_; ++r) {
        for (Index c : rows_[r]) {
            out.emplace_back(static_cast<Index>(r), c);
        }
    }
    return out;
}

SparseBitMatrix SparseBitMatrix::transpose() const {
    SparseBitMatrix t(n_cols_, n_rows_);
    t.rows_ = cols_;
    t.cols_ = rows_;
    t.nnz_ = nnz_;
    return t;
}

SparseBitMatrix SparseBitMatrix::select_columns(std::span<const Index> columns) const {
    std::vector<std::vector<Index>> picked;
    picked.reserve(columns.size());
    for (Index c : columns) {
        if (c >= n_cols_) {
            throw ContractError("select_columns: column out of range");
        }
        picked.push_back(cols_[c]);
    }
    return from_columns(n_rows_, picked);
}

SparseBitMatrix SparseBitMatrix::select_rows(std::span<const Index> rows) const {
    std::vector<std::vector<Index>> picked;
    picked.reserve(rows.size());
    for (Index r : rows) {
        if (r >= n_rows_) {
            throw ContractError("select_rows: row out of range");
        }
        picked.push_back(rows_[r]);
    }
    return from_rows(n_cols_, picked);
}

SparseBitMatrix SparseBitMatrix::hstack(const SparseBitMatrix& left, const SparseBitMatrix& right) {
    if (left.n_rows_ != right.n_rows_) {
        throw ContractError("hstack: row count mismatch");
    }
    SparseBitMatrix m(left.n_rows_, left.n_cols_ + right.n_cols_);
    for (std::size_t r = 0; r < m.n_rows_; ++r) {
        m.rows_[r] = left.rows_[r];
        for (Index c : right.rows_[r]) {
            m.rows_[r].push_back(static_cast<Index>(c + left.n_cols_));
        }
    }
    m.rebuild_columns();
    return m;
}

SparseBitMatrix SparseBitMatrix::vstack(const SparseBitMatrix& top, const SparseBitMatrix& bottom) {
    if (top.n_cols_ != bottom.n_cols_) {
        throw ContractError("vstack: column count mismatch");
    }
    SparseBitMatrix m(top.n_rows_ + bottom.n_rows_, top.n_cols_);
    std::copy(top.rows_.begin(), top.rows_.end(), m.rows_.begin());
    std::copy(bottom.rows_.begin(), bottom.rows_.end(), m.rows_.begin() + static_cast<std::ptrdiff_t>(top.n_rows_));
    m.rebuild_columns();
    return m;
}

void SparseBitMatrix::check_invariants() const {
    std::size_t count = 0;
    std::vector<std::size_t> col_count(n_cols_, 0);
    for (std::size_t r = 0; r < n_rows_; ++r) {
        for (std::size_t k = 0; k < rows_[r].size(); ++k) {
            Index c = rows_[r][k];
            if (c >= n_cols_ || (k > 0 && c <= rows_[r][k - 1])) {
                throw ContractError("row adjacency not sorted/in range");
            }
            if (!std::binary_search(cols_[c].begin(), cols_[c].end(), static_cast<Index>(r))) {
                throw ContractError("row and column views disagree");
            }
            ++col_count[c];
            ++count;
        }
    }
    for (std::size_t c = 0; c < n_cols_; ++c) {
        if (cols_[c].size() != col_count[c] || !std::is_sorted(cols_[c].begin(), cols_[c].end())) {
            throw ContractError("column adjacency inconsistent");
        }
    }
    if (count != nnz_) {
        throw ContractError("nnz mismatch");
    }
}

bool SparseBitMatrix::operator==(const SparseBitMatrix& other) const {
    return n_rows_ == other.n_rows_ && n_cols_ == other.n_cols_ && rows_ == other.rows_;
}

Bits matvec(const SparseBitMatrix& m, std::span<const std::uint8_t> v) {
    if (v.size() != m.n_cols()) {
        throw ContractError("matvec: vector length " + std::to_string(v.size()) + " != n_cols " +
                            std::to_string(m.n_cols()));
    }
    Bits out(m.n_rows(), 0);
    for (std::size_t r = 0; r < m.n_rows(); ++r) {
        std::uint8_t acc = 0;
        for (Index c : m.row(r)) {
            acc ^= v[c] & 1U;
        }
        out[r] = acc;
    }
    return out;
}

BitVector matvec(const SparseBitMatrix& m, const BitVector& v) {
    if (v.size() != m.n_cols()) {
        throw ContractError("matvec: vector length mismatch");
    }
    Bits acc(m.n_rows(), 0);
    for (Index c : v.support()) {
        for (Index r : m.col(c)) {
            acc[r] ^= 1U;
        }
    }
    return BitVector::from_dense(acc);
}

SparseBitMatrix multiply(const SparseBitMatrix& a, const SparseBitMatrix& b) {
    if (a.n_cols() != b.n_rows()) {
        throw ContractError("multiply: inner dimension mismatch");
    }
    std::vector<std::vector<Index>> rows(a.n_rows());
    Bits acc(b.n_cols(), 0);
    for (std::size_t r = 0; r < a.n_rows(); ++r) {
        std::fill(acc.begin(), acc.end(), 0);
        for (Index k : a.row(r)) {
            for (Index c : b.row(k)) {
                acc[c] ^= 1U;
            }
        }
        for (std::size_t c = 0; c < acc.size(); ++c) {
            if (acc[c]) {
                rows[r].push_back(static_cast<Index>(c));
            }
        }
    }
    return SparseBitMatrix::from_rows(b.n_cols(), rows);
}

// ---------------------------------------------------------------------------
// DenseBitMatrix

DenseBitMatrix::DenseBitMatrix(std::size_t n_rows, std::size_t n_cols)
    : n_rows_(n_rows), n_cols_(n_cols), words_((n_cols + 63) / 64), data_(n_rows * words_, 0) {}

DenseBitMatrix DenseBitMatrix::from_sparse(const SparseBitMatrix& m) {
    DenseBitMatrix d(m.n_rows(), m.n_cols());
    for (std::size_t r = 0; r < m.n_rows(); ++r) {
        for (Index c : m.row(r)) {
            d.set(r, c);
        }
    }
    return d;
}

void DenseBitMatrix::xor_row(std::size_t dst, std::size_t src) {
    std::uint64_t* d = data_.data() + dst * words_;
    const std::uint64_t* s = data_.data() + src * words_;
    for (std::size_t w = 0; w < words_; ++w) {
        d[w] ^= s[w];
    }
}

void DenseBitMatrix::swap_rows(std::size_t a, std::size_t b) {
    if (a == b) {
        return;
    }
    std::swap_ranges(data_.begin() + static_cast<std::ptrdiff_t>(a * words_),
                     data_.begin() + static_cast<std::ptrdiff_t>((a + 1) * words_),
                     data_.begin() + static_cast<std::ptrdiff_t>(b * words_));
}

// ---------------------------------------------------------------------------
// Elimination

Elimination row_reduce(const SparseBitMatrix& m, std::span<const Index> column_order, bool full_scan) {
    if (column_order.size() != m.n_cols()) {
        throw ContractError("row_reduce: column order must be a permutation of all columns");
    }
    {
        std::vector<std::uint8_t> seen(m.n_cols(), 0);
        for (Index c : column_order) {
            if (c >= m.n_cols() || seen[c]) {
                throw ContractError("row_reduce: column order is not a permutation");
            }
            seen[c] = 1;
        }
    }

    Elimination e;
    e.n_rows = m.n_rows();
    e.n_cols = m.n_cols();
    e.reduced = DenseBitMatrix::from_sparse(m);
    e.transform = DenseBitMatrix(m.n_rows(), m.n_rows());
    for (std::size_t r = 0; r < m.n_rows(); ++r) {
        e.transform.set(r, r);
    }

    std::size_t rank = 0;
    for (Index c : column_order) {
        if (rank == m.n_rows() && !full_scan) {
            break;
        }
        std::size_t pivot_row = m.n_rows();
        for (std::size_t r = rank; r < m.n_rows(); ++r) {
            if (e.reduced.test(r, c)) {
                pivot_row = r;
                break;
            }
        }
        if (pivot_row == m.n_rows()) {
            continue;
        }
        e.reduced.swap_rows(rank, pivot_row);
        e.transform.swap_rows(rank, pivot_row);
        for (std::size_t r = 0; r < m.n_rows(); ++r) {
            if (r != rank && e.reduced.test(r, c)) {
                e.reduced.xor_row(r, rank);
                e.transform.xor_row(r, rank);
            }
        }
        e.pivot_columns.push_back(c);
        ++rank;
    }
    return e;
}

Elimination row_reduce(const SparseBitMatrix& m) {
    std::vector<Index> order(m.n_cols());
    std::iota(order.begin(), order.end(), Index{0});
    return row_reduce(m, order, true);
}

std::vector<std::uint64_t> Elimination::transformed(std::span<const std::uint8_t> s) const {
    if (s.size() != n_rows) {
        throw ContractError("solve: syndrome length mismatch");
    }
    std::vector<std::uint64_t> packed((n_rows + 63) / 64, 0);
    for (std::size_t r = 0; r < n_rows; ++r) {
        if (s[r] & 1U) {
            packed[r / 64] |= std::uint64_t{1} << (r % 64);
        }
    }
    std::vector<std::uint64_t> y((n_rows + 63) / 64, 0);
    for (std::size_t k = 0; k < n_rows; ++k) {
        auto row = transform.row_words(k);
        std::uint64_t acc = 0;
        for (std::size_t w = 0; w < row.size(); ++w) {
            acc ^= row[w] & packed[w];
        }
        if (std::popcount(acc) & 1) {
            y[k / 64] |= std::uint64_t{1} << (k % 64);
        }
    }
    return y;
}

std::optional<Bits> Elimination::solve(std::span<const std::uint8_t> s) const {
    auto y = transformed(s);
    for (std::size_t k = rank(); k < n_rows; ++k) {
        if ((y[k / 64] >> (k % 64)) & 1U) {
            return std::nullopt;
        }
    }
    Bits x(n_cols, 0);
    for (std::size_t k = 0; k < rank(); ++k) {
        x[pivot_columns[k]] = (y[k / 64] >> (k % 64)) & 1U;
    }
    return x;
}

std::size_t rank(const SparseBitMatrix& m) {
    std::vector<Index> order(m.n_cols());
    std::iota(order.begin(), order.end(), Index{0});
    return row_reduce(m, order, false).rank();
}

std::vector<BitVector> kernel_basis(const SparseBitMatrix& m) {
    Elimination e = row_reduce(m);
    std::vector<std::uint8_t> is_pivot(m.n_cols(), 0);
    for (Index c : e.pivot_columns) {
        is_pivot[c] = 1;
    }
    std::vector<BitVector> basis;
    for (std::size_t c = 0; c < m.n_cols(); ++c) {
        if (is_pivot[c]) {
            continue;
        }
        std::vector<Index> support{static_cast<Index>(c)};
        for (std::size_t k = 0; k < e.rank(); ++k) {
            if (e.reduced.test(k, c)) {
                support.push_back(e.pivot_columns[k]);
            }
        }
        std::sort(support.begin(), support.end());
        basis.emplace_back(m.n_cols(), std::move(support));
    }
    return basis;
}

std::optional<BitVector> solve_in_span(const SparseBitMatrix& m, const BitVector& s, const Elimination& elimination) {
    if (elimination.n_rows != m.n_rows() || elimination.n_cols != m.n_cols()) {
        throw ContractError("solve_in_span: elimination does not match matrix");
    }
    auto x = elimination.solve(s.to_dense());
    if (!x) {
        return std::nullopt;
    }
    return BitVector::from_dense(*x);
}

// ---------------------------------------------------------------------------
// IncrementalBasis

IncrementalBasis::IncrementalBasis(std::size_t n_cols) : n_cols_(n_cols), words_((n_cols + 63) / 64) {}

std::vector<std::uint64_t> IncrementalBasis::pack(const BitVector& v) const {
    if (v.size() != n_cols_) {
        throw ContractError("IncrementalBasis: length mismatch");
    }
    std::vector<std::uint64_t> w(words_, 0);
    for (Index i : v.support()) {
        w[i / 64] |= std::uint64_t{1} << (i % 64);
    }
    return w;
}

void IncrementalBasis::reduce(std::vector<std::uint64_t>& w) const {
    // Rows are stored in insertion order; each is reduced against its predecessors,
    // so a single forward pass clears every pivot.
    for (std::size_t k = 0; k < rows_.size(); ++k) {
        std::size_t p = pivots_[k];
        if ((w[p / 64] >> (p % 64)) & 1U) {
            for (std::size_t i = 0; i < words_; ++i) {
                w[i] ^= rows_[k][i];
            }
        }
    }
}

bool IncrementalBasis::insert_packed(std::vector<std::uint64_t> w) {
    reduce(w);
    for (std::size_t i = 0; i < words_; ++i) {
        if (w[i] != 0) {
            pivots_.push_back(i * 64 + static_cast<std::size_t>(std::countr_zero(w[i])));
            rows_.push_back(std::move(w));
            return true;
        }
    }
    return false;
}

bool IncrementalBasis::insert(const BitVector& v) {
    return insert_packed(pack(v));
}

bool IncrementalBasis::insert(std::span<const std::uint8_t> v) {
    return insert(BitVector::from_dense(v));
}

bool IncrementalBasis::contains(const BitVector& v) const {
    auto w = pack(v);
    reduce(w);
    return std::all_of(w.begin(), w.end(), [](std::uint64_t x) { return x == 0; });
}

// ---------------------------------------------------------------------------
// Triplet text format

void write_triplets(std::ostream& out, const SparseBitMatrix& m) {
    out << m.n_rows() << ' ' << m.n_cols() << ' ' << m.nnz() << '\n';
    for (const auto& [r, c] : m.triplets()) {
        out << r << ' ' << c << '\n';
    }
}

SparseBitMatrix read_triplets(std::istream& in) {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t nnz = 0;
    if (!(in >> rows >> cols >> nnz)) {
        throw std::runtime_error("triplet file: missing 'rows cols nnz' header");
    }
    std::vector<std::pair<Index, Index>> entries;
    entries.reserve(nnz);
    for (std::size_t k = 0; k < nnz; ++k) {
        long long r = -1;
        long long c = -1;
        if (!(in >> r >> c)) {
            throw std::runtime_error("triplet file: expected " + std::to_string(nnz) + " entries, got " +
                                     std::to_string(k));
        }
        if (r < 0 || c < 0) {
            throw std::runtime_error("triplet file: negative index");
        }
        entries.emplace_back(static_cast<Index>(r), static_cast<Index>(c));
    }
    try {
        return SparseBitMatrix::from_triplets(rows, cols, entries);
    } catch (const ContractError& e) {
        throw std::runtime_error(std::string("triplet file: ") + e.what());
    }
}

}  // namespace qgdg
