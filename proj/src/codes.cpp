#include "qgdg/codes.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <istream>
#include <map>
#include <sstream>

namespace qgdg {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
        ++b;
    }
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
        --e;
    }
    return std::string(s.substr(b, e - b));
}

std::size_t parse_size(std::string_view s, const std::string& context) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::invalid_argument("cannot parse integer '" + std::string(s) + "' in " + context);
    }
    return value;
}

// Parses a factor like "x", "x^3", "y^2", "1".
void parse_factor(std::string_view f, std::size_t& a, std::size_t& b, const std::string& context) {
    std::string t = trim(f);
    if (t.empty()) {
        throw std::invalid_argument("empty factor in " + context);
    }
    if (t == "1") {
        return;
    }
    char var = t[0];
    if (var != 'x' && var != 'y') {
        throw std::invalid_argument("unknown variable '" + t + "' in " + context);
    }
    std::size_t exponent = 1;
    if (t.size() > 1) {
        if (t[1] != '^') {
            throw std::invalid_argument("malformed monomial '" + t + "' in " + context);
        }
        exponent = parse_size(std::string_view(t).substr(2), context);
    }
    (var == 'x' ? a : b) += exponent;
}

}  // namespace

// ---------------------------------------------------------------------------
// BivariatePoly

BivariatePoly::BivariatePoly(std::size_t l, std::size_t m,
                             const std::vector<std::pair<std::size_t, std::size_t>>& monomials)
    : l_(l), m_(m) {
    for (const auto& [a, b] : monomials) {
        toggle(a, b);
    }
}

void BivariatePoly::toggle(std::size_t a, std::size_t b) {
    if (l_ == 0 || m_ == 0) {
        throw ContractError("BivariatePoly: cyclic orders must be positive");
    }
    std::pair<std::size_t, std::size_t> key{a % l_, b % m_};
    if (auto it = monomials_.find(key); it != monomials_.end()) {
        monomials_.erase(it);
    } else {
        monomials_.insert(key);
    }
}

BivariatePoly BivariatePoly::parse(std::size_t l, std::size_t m, const std::string& text) {
    BivariatePoly p(l, m);
    std::stringstream terms(text);
    std::string term;
    bool any = false;
    while (std::getline(terms, term, '+')) {
        std::size_t a = 0;
        std::size_t b = 0;
        std::stringstream factors(term);
        std::string factor;
        bool got = false;
        while (std::getline(factors, factor, '*')) {
            parse_factor(factor, a, b, "polynomial '" + text + "'");
            got = true;
        }
        if (!got) {
            throw std::invalid_argument("empty term in polynomial '" + text + "'");
        }
        p.toggle(a, b);
        any = true;
    }
    if (!any) {
        throw std::invalid_argument("empty polynomial");
    }
    return p;
}

std::string BivariatePoly::to_string() const {
    if (monomials_.empty()) {
        return "0";
    }
    std::string out;
    for (const auto& [a, b] : monomials_) {
        if (!out.empty()) {
            out += " + ";
        }
        std::string term;
        if (a > 0) {
            term += a == 1 ? "x" : "x^" + std::to_string(a);
        }
        if (b > 0) {
            if (!term.empty()) {
                term += "*";
            }
            term += b == 1 ? "y" : "y^" + std::to_string(b);
        }
        out += term.empty() ? "1" : term;
    }
    return out;
}

SparseBitMatrix circulant_matrix(const BivariatePoly& poly) {
    const std::size_t l = poly.l();
    const std::size_t m = poly.m();
    const std::size_t n = l * m;
    std::vector<std::pair<Index, Index>> entries;
    entries.reserve(n * poly.monomials().size());
    for (std::size_t i = 0; i < l; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            for (const auto& [a, b] : poly.monomials()) {
                std::size_t row = i * m + j;
                std::size_t col = ((i + a) % l) * m + (j + b) % m;
                entries.emplace_back(static_cast<Index>(row), static_cast<Index>(col));
            }
        }
    }
    return SparseBitMatrix::from_triplets(n, n, entries);
}

SparseBitMatrix logical_basis(const SparseBitMatrix& h, const SparseBitMatrix& other) {
    if (h.n_cols() != other.n_cols()) {
        throw ContractError("logical_basis: column count mismatch");
    }
    const std::size_t n = h.n_cols();
    IncrementalBasis span(n);
    for (std::size_t r = 0; r < other.n_rows(); ++r) {
        std::vector<Index> row(other.row(r).begin(), other.row(r).end());
        span.insert(BitVector(n, std::move(row)));
    }
    const std::size_t k = n - rank(h) - span.rank();
    std::vector<std::vector<Index>> rows;
    for (const BitVector& v : kernel_basis(h)) {
        if (rows.size() == k) {
            break;
        }
        if (span.insert(v)) {
            rows.push_back(v.support());
        }
    }
    if (rows.size() != k) {
        throw ContractError("logical_basis: inputs do not form a CSS pair");
    }
    return SparseBitMatrix::from_rows(n, rows);
}

CssCode build_bb_code(const BivariatePoly& a, const BivariatePoly& b) {
    if (a.l() != b.l() || a.m() != b.m()) {
        throw ContractError("build_bb_code: polynomials over different rings");
    }
    SparseBitMatrix ma = circulant_matrix(a);
    SparseBitMatrix mb = circulant_matrix(b);
    CssCode code;
    code.hx = SparseBitMatrix::hstack(ma, mb);
    code.hz = SparseBitMatrix::hstack(mb.transpose(), ma.transpose());
    code.n = code.hx.n_cols();
    if (multiply(code.hx, code.hz.transpose()).nnz() != 0) {
        throw ContractError("build_bb_code: CSS condition violated");
    }
    code.k = code.n - rank(code.hx) - rank(code.hz);
    code.lz = logical_basis(code.hz, code.hx);
    code.lx = logical_basis(code.hx, code.hz);
    code.provenance = "bb l=" + std::to_string(a.l()) + " m=" + std::to_string(a.m()) + " a=" + a.to_string() +
                      " b=" + b.to_string();
    return code;
}

CodeDescription parse_code_description(std::istream& in) {
    CodeDescription d;
    std::string line;
    bool have_dims = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::string t = trim(line);
        if (t.empty()) {
            continue;
        }
        const std::string where = "code description line " + std::to_string(line_no);
        if (!have_dims) {
            std::istringstream dims(t);
            if (!(dims >> d.l >> d.m) || d.l == 0 || d.m == 0) {
                throw std::invalid_argument(where + ": expected 'l m'");
            }
            have_dims = true;
            continue;
        }
        auto colon = t.find(':');
        if (colon == std::string::npos) {
            throw std::invalid_argument(where + ": expected 'key: value'");
        }
        std::string key = trim(std::string_view(t).substr(0, colon));
        std::string value = trim(std::string_view(t).substr(colon + 1));
        if (key == "a") {
            d.a = value;
        } else if (key == "b") {
            d.b = value;
        } else if (key == "d") {
            d.distance = parse_size(value, where);
        } else {
            throw std::invalid_argument(where + ": unknown key '" + key + "'");
        }
    }
    if (!have_dims || d.a.empty() || d.b.empty()) {
        throw std::invalid_argument("code description needs 'l m', 'a:' and 'b:' lines");
    }
    return d;
}

CssCode build_code(const CodeDescription& description) {
    CssCode code = build_bb_code(BivariatePoly::parse(description.l, description.m, description.a),
                                 BivariatePoly::parse(description.l, description.m, description.b));
    code.distance = description.distance;
    return code;
}

// ---------------------------------------------------------------------------
// Counting

std::uint64_t count_weight2_syndrome_configs(const SparseBitMatrix& h) {
    std::uint64_t total = 0;
    for (std::size_t c = 0; c < h.n_cols(); ++c) {
        std::uint64_t w = h.col_weight(c);
        total += w * (w - (w > 0 ? 1 : 0)) / 2;
    }
    return total;
}

std::uint64_t count_weight2_span_vectors(const SparseBitMatrix& h) {
    const Elimination e = row_reduce(h);
    const std::size_t r = e.rank();
    std::map<std::vector<std::uint64_t>, std::uint64_t> classes;
    Bits unit(h.n_rows(), 0);
    for (std::size_t i = 0; i < h.n_rows(); ++i) {
        unit[i] = 1;
        auto y = e.transformed(unit);
        unit[i] = 0;
        for (std::size_t k = 0; k < r; ++k) {
            y[k / 64] &= ~(std::uint64_t{1} << (k % 64));
        }
        ++classes[y];
    }
    std::uint64_t total = 0;
    for (const auto& [key, size] : classes) {
        total += size * (size - 1) / 2;
    }
    return total;
}

std::uint64_t LowWeightEnumeration::count(std::size_t size, std::size_t weight) const {
    if (size >= count_by_size_weight.size() || weight >= count_by_size_weight[size].size()) {
        return 0;
    }
    return count_by_size_weight[size][weight];
}

LowWeightEnumeration enumerate_low_weight_syndrome_codewords(const SparseBitMatrix& h, std::size_t max_columns,
                                                             std::size_t max_weight) {
    if (max_columns == 0 || max_columns > 3) {
        throw ContractError("enumerate_low_weight_syndrome_codewords: max_columns must be 1, 2 or 3");
    }
    const std::size_t n = h.n_cols();
    if (max_columns == 3 && n > kMaxColumnsForTriples) {
        throw std::invalid_argument("triple enumeration limited to " + std::to_string(kMaxColumnsForTriples) +
                                    " columns, matrix has " + std::to_string(n));
    }
    if (max_columns >= 2 && n > kMaxColumnsForPairs) {
        throw std::invalid_argument("pair enumeration limited to " + std::to_string(kMaxColumnsForPairs) +
                                    " columns, matrix has " + std::to_string(n));
    }

    LowWeightEnumeration out;
    out.count_by_size_weight.assign(max_columns + 1, std::vector<std::uint64_t>(max_weight + 1, 0));

    // Scratch parity array; touched rows are reset after each subset.
    std::vector<std::uint8_t> parity(h.n_rows(), 0);
    std::vector<Index> touched;
    auto record = [&](std::vector<Index> cols) {
        touched.clear();
        std::size_t weight = 0;
        for (Index c : cols) {
            for (Index r : h.col(c)) {
                parity[r] ^= 1U;
                weight += parity[r] ? 1 : 0;
                weight -= parity[r] ? 0 : 1;
                touched.push_back(r);
            }
        }
        for (Index r : touched) {
            parity[r] = 0;
        }
        if (weight <= max_weight) {
            ++out.count_by_size_weight[cols.size()][weight];
            if (weight > 0) {
                out.combinations.push_back({std::move(cols), weight});
            }
        }
    };

    for (Index i = 0; i < n; ++i) {
        record({i});
    }
    if (max_columns >= 2) {
        for (Index i = 0; i < n; ++i) {
            for (Index j = i + 1; j < n; ++j) {
                record({i, j});
            }
        }
    }
    if (max_columns >= 3) {
        // Prune: a triple can only reach low weight if the first pair overlaps enough
        // that the third column can cancel it down to max_weight.
        std::size_t max_col_weight = 0;
        for (std::size_t c = 0; c < n; ++c) {
            max_col_weight = std::max(max_col_weight, h.col_weight(c));
        }
        for (Index i = 0; i < n; ++i) {
            for (Index j = i + 1; j < n; ++j) {
                std::size_t wi = h.col_weight(i);
                std::size_t wj = h.col_weight(j);
                std::size_t overlap = 0;
                auto ci = h.col(i);
                auto cj = h.col(j);
                std::size_t a = 0;
                std::size_t b = 0;
                while (a < ci.size() && b < cj.size()) {
                    if (ci[a] == cj[b]) {
                        ++overlap;
                        ++a;
                        ++b;
                    } else if (ci[a] < cj[b]) {
                        ++a;
                    } else {
                        ++b;
                    }
                }
                std::size_t pair_weight = wi + wj - 2 * overlap;
                if (pair_weight > max_weight + max_col_weight) {
                    continue;
                }
                for (Index k = j + 1; k < n; ++k) {
                    record({i, j, k});
                }
            }
        }
    }
    return out;
}

std::uint64_t config_b_coefficient(const SparseBitMatrix& h) {
    // Each weight-3 codeword from three columns: choose the data column (3 ways) and
    // the two syndrome flips among its three checks (3 ways).
    return 9 * enumerate_low_weight_syndrome_codewords(h, 3, 3).count(3, 3);
}

// ---------------------------------------------------------------------------
// BitPoly

BitPoly BitPoly::from_exponents(const std::vector<std::size_t>& exponents) {
    BitPoly p;
    for (std::size_t e : exponents) {
        p.toggle(e);
    }
    p.trim();
    return p;
}

void BitPoly::toggle(std::size_t i) {
    if (words_.size() <= i / 64) {
        words_.resize(i / 64 + 1, 0);
    }
    words_[i / 64] ^= std::uint64_t{1} << (i % 64);
}

void BitPoly::trim() {
    while (!words_.empty() && words_.back() == 0) {
        words_.pop_back();
    }
}

long BitPoly::degree() const {
    if (words_.empty()) {
        return -1;
    }
    return static_cast<long>((words_.size() - 1) * 64 + 63 - std::countl_zero(words_.back()));
}

bool BitPoly::coefficient(std::size_t i) const {
    return i / 64 < words_.size() && ((words_[i / 64] >> (i % 64)) & 1U);
}

std::vector<std::size_t> BitPoly::exponents() const {
    std::vector<std::size_t> out;
    for (long i = 0; i <= degree(); ++i) {
        if (coefficient(static_cast<std::size_t>(i))) {
            out.push_back(static_cast<std::size_t>(i));
        }
    }
    return out;
}

std::string BitPoly::to_string() const {
    if (is_zero()) {
        return "0";
    }
    std::string out;
    auto exps = exponents();
    for (auto it = exps.rbegin(); it != exps.rend(); ++it) {
        if (!out.empty()) {
            out += " + ";
        }
        out += *it == 0 ? "1" : (*it == 1 ? "x" : "x^" + std::to_string(*it));
    }
    return out;
}

BitPoly BitPoly::operator+(const BitPoly& o) const {
    BitPoly r = *this;
    if (r.words_.size() < o.words_.size()) {
        r.words_.resize(o.words_.size(), 0);
    }
    for (std::size_t i = 0; i < o.words_.size(); ++i) {
        r.words_[i] ^= o.words_[i];
    }
    r.trim();
    return r;
}

BitPoly BitPoly::operator*(const BitPoly& o) const {
    BitPoly r;
    for (std::size_t i : exponents()) {
        for (std::size_t j : o.exponents()) {
            r.toggle(i + j);
        }
    }
    r.trim();
    return r;
}

BitPoly BitPoly::mod(const BitPoly& divisor) const {
    if (divisor.is_zero()) {
        throw ContractError("BitPoly::mod: division by zero polynomial");
    }
    BitPoly r = *this;
    const long dd = divisor.degree();
    const auto dexp = divisor.exponents();
    while (r.degree() >= dd) {
        const std::size_t shift = static_cast<std::size_t>(r.degree() - dd);
        for (std::size_t e : dexp) {
            r.toggle(e + shift);
        }
        r.trim();
    }
    return r;
}

BitPoly poly_gcd_gf2(const BitPoly& a, const BitPoly& b) {
    if (a.is_zero() || b.is_zero()) {
        throw ContractError("poly_gcd_gf2: inputs must be nonzero");
    }
    BitPoly x = a;
    BitPoly y = b;
    while (!y.is_zero()) {
        BitPoly r = x.mod(y);
        x = std::move(y);
        y = std::move(r);
    }
    return x;
}

bool divides(const BitPoly& g, const BitPoly& h) {
    return h.mod(g).is_zero();
}

}  // namespace qgdg
