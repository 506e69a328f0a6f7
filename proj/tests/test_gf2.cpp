#include <numeric>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "qgdg/codes.hpp"
#include "qgdg/gf2.hpp"

using namespace qgdg;

namespace {

std::vector<Index> natural(std::size_t n) {
    std::vector<Index> o(n);
    std::iota(o.begin(), o.end(), Index{0});
    return o;
}

}  // namespace

TEST_CASE("matvec on identity and zero") {
    auto id = SparseBitMatrix::identity(3);
    CHECK(matvec(id, Bits{1, 0, 1}) == Bits{1, 0, 1});
    CHECK(matvec(id, BitVector(3)).empty());
}

TEST_CASE("matvec of a unit vector picks a column of the N=288 check matrix") {
    auto code = build_bb_code(BivariatePoly::parse(12, 12, "x^3 + y^2 + y^7"),
                              BivariatePoly::parse(12, 12, "y^3 + x + x^2"));
    for (Index j : {0U, 17U, 150U, 287U}) {
        BitVector e(288, {j});
        BitVector col = matvec(code.hx, e);
        CHECK(col.weight() == 3);
        CHECK(std::equal(col.support().begin(), col.support().end(), code.hx.col(j).begin()));
    }
}

TEST_CASE("matvec dimension mismatch is a contract error") {
    CHECK_THROWS_AS(matvec(SparseBitMatrix::identity(3), Bits{1, 0}), ContractError);
}

TEST_CASE("matvec is linear") {
    CounterRng rng(5);
    auto m = oracle::random_matrix(rng, 12, 30, 0.2);
    for (int t = 0; t < 20; ++t) {
        Bits a(30), b(30), ab(30);
        for (std::size_t i = 0; i < 30; ++i) {
            a[i] = rng.uniform() < 0.5;
            b[i] = rng.uniform() < 0.5;
            ab[i] = a[i] ^ b[i];
        }
        Bits ma = matvec(m, a), mb = matvec(m, b), mab = matvec(m, ab);
        for (std::size_t r = 0; r < 12; ++r) {
            CHECK(mab[r] == (ma[r] ^ mb[r]));
        }
    }
}

TEST_CASE("from_triplets rejects duplicates and out of range entries") {
    std::vector<std::pair<Index, Index>> dup{{0, 0}, {0, 0}};
    CHECK_THROWS_AS(SparseBitMatrix::from_triplets(2, 2, dup), ContractError);
    std::vector<std::pair<Index, Index>> oor{{2, 0}};
    CHECK_THROWS_AS(SparseBitMatrix::from_triplets(2, 2, oor), ContractError);
}

TEST_CASE("row and column views agree") {
    CounterRng rng(11);
    auto m = oracle::random_matrix(rng, 15, 25, 0.3);
    m.check_invariants();
    std::size_t total = 0;
    for (std::size_t c = 0; c < m.n_cols(); ++c) {
        std::size_t count = 0;
        for (std::size_t r = 0; r < m.n_rows(); ++r) {
            auto row = m.row(r);
            count += std::count(row.begin(), row.end(), static_cast<Index>(c));
        }
        CHECK(count == m.col_weight(c));
        total += count;
    }
    CHECK(total == m.nnz());
}

TEST_CASE("row_reduce pivots") {
    SUBCASE("identity in natural order") {
        auto e = row_reduce(SparseBitMatrix::identity(3), natural(3));
        CHECK(e.pivot_columns == std::vector<Index>{0, 1, 2});
    }
    SUBCASE("identical columns keep the first") {
        auto m = SparseBitMatrix::from_columns(2, {{0, 1}, {0, 1}});
        auto e = row_reduce(m, natural(2));
        CHECK(e.pivot_columns == std::vector<Index>{0});
    }
    SUBCASE("order is respected") {
        auto m = SparseBitMatrix::from_columns(2, {{0, 1}, {0, 1}});
        std::vector<Index> order{1, 0};
        CHECK(row_reduce(m, order).pivot_columns == std::vector<Index>{1});
    }
    SUBCASE("non-permutation order rejected") {
        std::vector<Index> order{0, 0, 1};
        CHECK_THROWS_AS(row_reduce(SparseBitMatrix::identity(3), order), ContractError);
    }
}

TEST_CASE("rank agrees with a dense elimination oracle") {
    CounterRng rng(21);
    for (int t = 0; t < 50; ++t) {
        auto m = oracle::random_matrix(rng, 10, 20, 0.25);
        CHECK(rank(m) == oracle::rank(oracle::to_dense(m)));
        CHECK(rank(m) == rank(m.transpose()));
        CHECK(row_reduce(m, natural(20)).rank() == rank(m));
    }
    CHECK(rank(SparseBitMatrix::identity(4)) == 4);
    CHECK(rank(SparseBitMatrix(3, 5)) == 0);
}

TEST_CASE("rank and kernel of the N=288 check matrix") {
    auto code = build_bb_code(BivariatePoly::parse(12, 12, "x^3 + y^2 + y^7"),
                              BivariatePoly::parse(12, 12, "y^3 + x + x^2"));
    CHECK(rank(code.hx) == 138);
    CHECK(oracle::rank(oracle::to_dense(code.hx)) == 138);
    auto ker = kernel_basis(code.hx);
    CHECK(ker.size() == 150);
    for (const auto& k : ker) {
        CHECK(matvec(code.hx, k).empty());
    }
}

TEST_CASE("kernel basis small cases") {
    CHECK(kernel_basis(SparseBitMatrix::identity(4)).empty());
    auto m = SparseBitMatrix::from_rows(2, {{0, 1}});
    auto ker = kernel_basis(m);
    REQUIRE(ker.size() == 1);
    CHECK(ker[0].support() == std::vector<Index>{0, 1});
}

TEST_CASE("solve_in_span") {
    SUBCASE("identity returns s") {
        auto id = SparseBitMatrix::identity(4);
        auto e = row_reduce(id);
        BitVector s(4, {1, 3});
        auto x = solve_in_span(id, s, e);
        REQUIRE(x);
        CHECK(*x == s);
    }
    SUBCASE("outside the span") {
        auto m = SparseBitMatrix::from_columns(2, {{0, 1}});
        auto e = row_reduce(m);
        CHECK_FALSE(solve_in_span(m, BitVector(2, {0}), e));
    }
    SUBCASE("random achievable syndromes") {
        CounterRng rng(33);
        for (int t = 0; t < 30; ++t) {
            auto m = oracle::random_matrix(rng, 8, 16, 0.3);
            Bits x0(16);
            for (auto& b : x0) {
                b = rng.uniform() < 0.5;
            }
            BitVector s = BitVector::from_dense(matvec(m, x0));
            auto e = row_reduce(m);
            auto x = solve_in_span(m, s, e);
            REQUIRE(x);
            CHECK(matvec(m, *x) == s);
            for (Index i : x->support()) {
                CHECK(std::find(e.pivot_columns.begin(), e.pivot_columns.end(), i) != e.pivot_columns.end());
            }
        }
    }
}

TEST_CASE("triplet text round trip") {
    CounterRng rng(3);
    auto m = oracle::random_matrix(rng, 7, 9, 0.3);
    std::stringstream ss;
    write_triplets(ss, m);
    auto back = read_triplets(ss);
    CHECK(back == m);
    std::stringstream again;
    write_triplets(again, back);
    std::stringstream first;
    write_triplets(first, m);
    CHECK(again.str() == first.str());
}

TEST_CASE("read_triplets rejects malformed input") {
    std::stringstream bad("2 2 1\n5 0\n");
    CHECK_THROWS(read_triplets(bad));
}

TEST_CASE("IncrementalBasis") {
    IncrementalBasis b(4);
    CHECK(b.insert(BitVector(4, {0, 1})));
    CHECK(b.insert(BitVector(4, {1, 2})));
    CHECK_FALSE(b.insert(BitVector(4, {0, 2})));
    CHECK(b.contains(BitVector(4, {0, 2})));
    CHECK(b.rank() == 2);
}
