#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "qgdg/codes.hpp"

using namespace qgdg;

namespace {

CssCode bb288() {
    return build_bb_code(BivariatePoly::parse(12, 12, "x^3 + y^2 + y^7"),
                         BivariatePoly::parse(12, 12, "y^3 + x + x^2"));
}

}  // namespace

TEST_CASE("polynomial parsing") {
    auto p = BivariatePoly::parse(12, 12, "x^3 + y^2 + y^7");
    CHECK(p.monomials().size() == 3);
    CHECK(p.monomials().count({3, 0}) == 1);
    CHECK(p.monomials().count({0, 7}) == 1);
    auto q = BivariatePoly::parse(4, 4, "x*y^2 + 1");
    CHECK(q.monomials().count({1, 2}) == 1);
    CHECK(q.monomials().count({0, 0}) == 1);
    CHECK(BivariatePoly::parse(4, 4, "x + x").monomials().empty());
    CHECK_THROWS(BivariatePoly::parse(4, 4, "z^2"));
    CHECK_THROWS(BivariatePoly::parse(4, 4, "x^ + 1"));
}

TEST_CASE("circulant matrices") {
    auto one = circulant_matrix(BivariatePoly::parse(2, 2, "1"));
    CHECK(one == SparseBitMatrix::identity(4));
    auto shift = circulant_matrix(BivariatePoly::parse(3, 1, "x"));
    CHECK(shift.test(0, 1));
    CHECK(shift.test(1, 2));
    CHECK(shift.test(2, 0));
    CHECK(shift.nnz() == 3);
    auto a = circulant_matrix(BivariatePoly::parse(12, 12, "x^3 + y^2 + y^7"));
    CHECK(a.n_rows() == 144);
    for (std::size_t i = 0; i < 144; ++i) {
        CHECK(a.row_weight(i) == 3);
        CHECK(a.col_weight(i) == 3);
    }
}

TEST_CASE("the [[288,12]] code") {
    auto code = bb288();
    CHECK(code.n == 288);
    CHECK(code.k == 12);
    CHECK(multiply(code.hx, code.hz.transpose()).nnz() == 0);
    for (std::size_t c = 0; c < code.n; ++c) {
        CHECK(code.hx.col_weight(c) == 3);
    }
    for (std::size_t r = 0; r < code.hx.n_rows(); ++r) {
        CHECK(code.hx.row_weight(r) == 6);
    }
}

TEST_CASE("logical bases") {
    auto code = bb288();
    REQUIRE(code.lz.n_rows() == 12);
    REQUIRE(code.lx.n_rows() == 12);
    const std::size_t rank_hz = oracle::rank(oracle::to_dense(code.hz));
    const std::size_t rank_hx = oracle::rank(oracle::to_dense(code.hx));
    for (std::size_t r = 0; r < 12; ++r) {
        BitVector lz(288, {code.lz.row(r).begin(), code.lz.row(r).end()});
        CHECK(matvec(code.hz, lz).empty());
        BitVector lx(288, {code.lx.row(r).begin(), code.lx.row(r).end()});
        CHECK(matvec(code.hx, lx).empty());
        auto with_lx = oracle::to_dense(code.hz);
        with_lx.push_back(lx.to_dense());
        CHECK(oracle::rank(with_lx) == rank_hz + 1);
        auto with_lz = oracle::to_dense(code.hx);
        with_lz.push_back(lz.to_dense());
        CHECK(oracle::rank(with_lz) == rank_hx + 1);
    }
    auto stacked = oracle::to_dense(SparseBitMatrix::vstack(code.hz, code.lx));
    CHECK(oracle::rank(stacked) == rank_hz + 12);
    // every undetectable logical error flips at least one observable
    auto pairing = multiply(code.lz, code.lx.transpose());
    CHECK(oracle::rank(oracle::to_dense(pairing)) == 12);
}

TEST_CASE("degenerate N=2 code") {
    auto code = build_bb_code(BivariatePoly::parse(1, 1, "1"), BivariatePoly::parse(1, 1, "1"));
    CHECK(code.n == 2);
    CHECK(code.k == 0);
    CHECK(code.hx == SparseBitMatrix::from_rows(2, {{0, 1}}));
}

TEST_CASE("logical basis of a repetition pair") {
    auto h = SparseBitMatrix::from_rows(2, {{0, 1}});
    auto l = logical_basis(h, SparseBitMatrix(0, 2));
    REQUIRE(l.n_rows() == 1);
    CHECK(l.row(0).size() == 2);
}

TEST_CASE("code description text") {
    std::istringstream in("# comment\n12 12\na: x^3 + y^2 + y^7\nb: y^3 + x + x^2\nd: 18\n");
    auto d = parse_code_description(in);
    CHECK(d.l == 12);
    CHECK(d.distance == 18);
    auto code = build_code(d);
    CHECK(code.k == 12);
    CHECK(code.distance == 18);
    std::istringstream bad("12\na: x\n");
    CHECK_THROWS(parse_code_description(bad));
    std::istringstream missing("3 3\na: x\n");
    CHECK_THROWS(parse_code_description(missing));
}

TEST_CASE("weight-two syndrome configurations") {
    CHECK(count_weight2_syndrome_configs(SparseBitMatrix::identity(5)) == 0);
    CHECK(count_weight2_syndrome_configs(SparseBitMatrix::from_columns(3, {{0, 1, 2}})) == 3);
    CHECK(count_weight2_syndrome_configs(bb288().hx) == 864);
}

TEST_CASE("low-weight syndrome codewords") {
    auto hx = bb288().hx;
    auto pairs = enumerate_low_weight_syndrome_codewords(hx, 2, 2);
    CHECK(pairs.count(2, 2) == 0);
    CHECK(pairs.count(1, 2) == 0);
    auto triples = enumerate_low_weight_syndrome_codewords(hx, 3, 3);
    CHECK(triples.count(3, 3) == 288);
    CHECK(config_b_coefficient(hx) == 2592);

    auto id = enumerate_low_weight_syndrome_codewords(SparseBitMatrix::identity(6), 2, 2);
    CHECK(id.count(2, 2) == 15);
    CHECK(id.count(2, 1) == 0);
    CHECK(id.count(1, 1) == 6);
}

TEST_CASE("low-weight enumeration agrees with an explicit XOR") {
    CounterRng rng(8);
    auto m = oracle::random_matrix(rng, 10, 14, 0.3);
    auto en = enumerate_low_weight_syndrome_codewords(m, 3, 3);
    for (const auto& combo : en.combinations) {
        Bits x(14, 0);
        for (Index c : combo.columns) {
            x[c] = 1;
        }
        auto s = matvec(m, x);
        CHECK(static_cast<std::size_t>(std::count(s.begin(), s.end(), 1)) == combo.weight);
    }
}

TEST_CASE("weight-two vectors of the column span") {
    CHECK(count_weight2_span_vectors(bb288().hx) == 216);
    CHECK(count_weight2_span_vectors(SparseBitMatrix::identity(5)) == 10);
    CHECK(count_weight2_span_vectors(SparseBitMatrix::from_columns(3, {{0, 1, 2}})) == 0);

    CounterRng rng(17);
    for (int t = 0; t < 20; ++t) {
        auto m = oracle::random_matrix(rng, 7, 5, 0.4);
        std::uint64_t brute = 0;
        for (Index i = 0; i < 7; ++i) {
            for (Index j = i + 1; j < 7; ++j) {
                bool found = false;
                for (std::uint32_t x = 0; x < 32 && !found; ++x) {
                    Bits v(5, 0);
                    for (Index c = 0; c < 5; ++c) {
                        v[c] = (x >> c) & 1U;
                    }
                    auto s = matvec(m, v);
                    found = std::count(s.begin(), s.end(), 1) == 2 && s[i] && s[j];
                }
                brute += found;
            }
        }
        CHECK(count_weight2_span_vectors(m) == brute);
    }
}

TEST_CASE("config_b coefficient on tiny matrices") {
    CHECK(config_b_coefficient(SparseBitMatrix::identity(4)) == 36);
    CHECK(config_b_coefficient(SparseBitMatrix::from_columns(2, {{0, 1}, {0, 1}, {0, 1}, {0, 1}})) == 0);
    auto m = SparseBitMatrix::from_columns(3, {{0}, {1}, {2}});
    CHECK(config_b_coefficient(m) == 9);
}

TEST_CASE("enumeration size guard") {
    SparseBitMatrix big(4, kMaxColumnsForTriples + 1);
    CHECK_THROWS_AS(enumerate_low_weight_syndrome_codewords(big, 3, 3), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_low_weight_syndrome_codewords(big, 4, 3), ContractError);
}

TEST_CASE("polynomial gcd over GF(2)") {
    auto a = BitPoly::from_exponents({2, 0});
    auto b = BitPoly::from_exponents({1, 0});
    CHECK(poly_gcd_gf2(a, b) == b);
    CHECK(poly_gcd_gf2(a, a) == a);
    CHECK_THROWS_AS(poly_gcd_gf2(a, BitPoly{}), ContractError);
    CHECK((b * b) == a);
    CHECK(divides(b, a));
    CHECK_FALSE(divides(a, b));
}

TEST_CASE("gcd of the [[254,28]] polynomials") {
    auto a = BitPoly::from_exponents({0, 15, 20, 28, 66});
    auto b = BitPoly::from_exponents({0, 58, 59, 100, 121});
    auto ring = BitPoly::from_exponents({127, 0});
    auto plain = poly_gcd_gf2(a, b);
    CHECK(plain.exponents() == std::vector<std::size_t>{0, 2, 4, 5, 6, 7, 8, 10, 13, 15, 16});
    auto cyclic = poly_gcd_gf2(plain, ring);
    auto f1 = BitPoly::from_exponents({7, 6, 5, 4, 0});
    auto f2 = BitPoly::from_exponents({7, 6, 5, 4, 2, 1, 0});
    CHECK(cyclic == f1 * f2);
    CHECK(divides(cyclic, a));
    CHECK(divides(cyclic, b));

    auto g1 = BitPoly::from_exponents({7, 1, 0});
    auto g2 = BitPoly::from_exponents({7, 5, 3, 1, 0});
    CHECK(divides(g1, ring));
    CHECK(divides(g2, ring));
    CHECK_FALSE(divides(g1 * g2, plain));
    CHECK_FALSE(divides(g1, a));
}
