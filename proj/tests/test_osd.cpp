#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "qgdg/osd.hpp"

using namespace qgdg;

namespace {

struct Instance {
    SparseBitMatrix h;
    std::vector<double> llrs;
    Bits s;
    std::vector<Index> order;
};

Instance random_instance(CounterRng& rng, std::size_t rows, std::size_t cols) {
    Instance in;
    in.h = oracle::random_matrix(rng, rows, cols, 0.35);
    in.llrs.resize(cols);
    for (double& l : in.llrs) {
        l = 0.2 + 4.0 * rng.uniform();
    }
    Bits x(cols);
    for (auto& b : x) {
        b = rng.uniform() < 0.25;
    }
    in.s = matvec(in.h, x);
    std::vector<double> scores(cols);
    for (double& v : scores) {
        v = rng.uniform();
    }
    in.order = rank_columns(scores);
    return in;
}

// Pivots chosen greedily in `order`, then every candidate of the sweep solved by brute force.
double candidate_oracle(const Instance& in, std::size_t lambda, std::optional<std::size_t> restrict_to) {
    const auto dense = oracle::to_dense(in.h);
    const std::size_t n = in.h.n_cols();
    std::vector<Index> pivots, rest;
    std::vector<std::size_t> position(n);
    oracle::Dense chosen;
    for (std::size_t k = 0; k < n; ++k) {
        const Index c = in.order[k];
        position[c] = k;
        auto trial = chosen;
        std::vector<std::uint8_t> col(in.h.n_rows());
        for (std::size_t r = 0; r < col.size(); ++r) {
            col[r] = dense[r][c];
        }
        trial.push_back(col);
        if (oracle::rank(trial) > chosen.size()) {
            chosen = trial;
            pivots.push_back(c);
        } else {
            rest.push_back(c);
        }
    }
    auto solve = [&](const std::vector<Index>& flips) -> double {
        // Unique pivot assignment reproducing s given the flipped non-pivots.
        for (std::uint32_t m = 0; m < (1U << pivots.size()); ++m) {
            std::vector<std::uint8_t> x(n, 0);
            for (std::size_t k = 0; k < pivots.size(); ++k) {
                x[pivots[k]] = (m >> k) & 1U;
            }
            for (Index f : flips) {
                x[f] = 1;
            }
            if (oracle::matvec(dense, x) == in.s) {
                double pm = 0.0;
                for (std::size_t c = 0; c < n; ++c) {
                    pm += x[c] ? in.llrs[c] : 0.0;
                }
                return pm;
            }
        }
        return INFINITY;
    };
    std::vector<Index> swept;
    for (Index c : rest) {
        if (!restrict_to || position[c] < *restrict_to) {
            swept.push_back(c);
        }
    }
    double best = solve({});
    for (Index c : swept) {
        best = std::min(best, solve({c}));
    }
    const std::size_t top = std::min(lambda, swept.size());
    for (std::size_t a = 0; a < top; ++a) {
        for (std::size_t b = a + 1; b < top; ++b) {
            best = std::min(best, solve({swept[a], swept[b]}));
        }
    }
    return best;
}

}  // namespace

TEST_CASE("column ranking") {
    std::vector<double> scores{3.0, -1.0, 0.0};
    CHECK(rank_columns(scores) == std::vector<Index>{1, 2, 0});
    std::vector<double> flat(5, 1.0);
    CHECK(rank_columns(flat) == std::vector<Index>{0, 1, 2, 3, 4});
    CounterRng rng(2);
    std::vector<double> random(50);
    for (double& v : random) {
        v = std::floor(10.0 * rng.uniform());
    }
    auto order = rank_columns(random);
    for (std::size_t k = 1; k < order.size(); ++k) {
        const bool sorted = random[order[k - 1]] < random[order[k]] ||
                            (random[order[k - 1]] == random[order[k]] && order[k - 1] < order[k]);
        CHECK(sorted);
    }
}

TEST_CASE("OSD-0") {
    auto id = SparseBitMatrix::identity(5);
    std::vector<double> llrs(5, 1.0);
    std::vector<Index> order{4, 2, 0, 1, 3};
    Bits s{1, 0, 1, 1, 0};
    auto r = osd0(id, s, order, llrs);
    REQUIRE(r);
    CHECK(r->estimate == s);
    CHECK(r->pm.value() == 3.0);

    CounterRng rng(3);
    for (int t = 0; t < 100; ++t) {
        auto in = random_instance(rng, 8, 20);
        auto zero = osd0(in.h, Bits(8, 0), in.order, in.llrs);
        REQUIRE(zero);
        CHECK(zero->estimate == Bits(20, 0));
        auto sol = osd0(in.h, in.s, in.order, in.llrs);
        REQUIRE(sol);
        CHECK(matvec(in.h, sol->estimate) == in.s);
        CHECK(sol->pm.value() == doctest::Approx(candidate_oracle(in, 0, 0)));
    }

    auto deficient = SparseBitMatrix::from_rows(2, {{0, 1}, {0, 1}});
    CHECK_FALSE(osd0(deficient, Bits{1, 0}, std::vector<Index>{0, 1}, std::vector<double>{1.0, 1.0}));
}

TEST_CASE("OSD-CS against candidate enumeration") {
    CounterRng rng(4);
    for (int t = 0; t < 300; ++t) {
        auto in = random_instance(rng, t % 2 ? 4 : 7, t % 2 ? 8 : 14);
        const std::size_t lambda = rng.next() % 6;
        auto cs = osd_cs(in.h, in.s, in.order, in.llrs, lambda);
        REQUIRE(cs);
        CHECK(matvec(in.h, cs->estimate) == in.s);
        CHECK(cs->pm.value() == doctest::Approx(candidate_oracle(in, lambda, std::nullopt)));
        auto zero = osd0(in.h, in.s, in.order, in.llrs);
        CHECK(cs->pm.value() <= zero->pm.value() + 1e-12);

        auto lam0 = osd_cs(in.h, in.s, in.order, in.llrs, 0);
        auto restricted0 = osd_cs(in.h, in.s, in.order, in.llrs, 0, 0);
        CHECK(restricted0->estimate == zero->estimate);
        CHECK(lam0->pm.value() <= zero->pm.value());

        const std::size_t cut = 2 + rng.next() % in.h.n_cols();
        auto restricted = osd_cs(in.h, in.s, in.order, in.llrs, lambda, cut);
        CHECK(restricted->pm.value() == doctest::Approx(candidate_oracle(in, lambda, cut)));
    }
}

TEST_CASE("OSD-CS is monotone in the order") {
    CounterRng rng(6);
    for (int t = 0; t < 50; ++t) {
        auto in = random_instance(rng, 10, 20);
        double prev = INFINITY;
        for (std::size_t lambda = 0; lambda <= 10; ++lambda) {
            auto r = osd_cs(in.h, in.s, in.order, in.llrs, lambda);
            CHECK(r->pm.value() <= prev);
            prev = r->pm.value();
        }
    }
}

TEST_CASE("OSD-CS never beats exhaustive ML") {
    CounterRng rng(7);
    for (int t = 0; t < 100; ++t) {
        auto in = random_instance(rng, 8, 16);
        auto r = osd_cs(in.h, in.s, in.order, in.llrs, 10);
        auto ml = oracle::exhaustive_ml(in.h, in.llrs, in.s);
        REQUIRE(ml);
        CHECK(r->pm.value() >= ml->pm - 1e-9);
    }
}

TEST_CASE("BP+OSD") {
    CounterRng rng(8);
    for (int t = 0; t < 100; ++t) {
        auto in = random_instance(rng, 10, 24);
        for (OsdMethod m : {OsdMethod::Osd0, OsdMethod::OsdCs}) {
            OsdConfig cfg;
            cfg.method = m;
            cfg.bp_iterations = 20;
            auto r = bp_osd_decode(in.h, in.llrs, in.s, cfg);
            CHECK(r.success);
            CHECK(matvec(in.h, r.estimate) == in.s);
            CHECK(r.pm.is_finite());
            CHECK(r.pm.value() == doctest::Approx(path_metric(in.h, in.llrs, in.s, r.estimate).value()));
        }
    }
    auto id = SparseBitMatrix::identity(3);
    std::vector<double> llrs(3, 2.0);
    auto easy = bp_osd_decode(id, llrs, Bits{0, 1, 0}, OsdConfig{});
    CHECK(easy.bp_converged);
    CHECK(easy.estimate == Bits{0, 1, 0});

    auto deficient = SparseBitMatrix::from_rows(2, {{0, 1}, {0, 1}});
    auto bad = bp_osd_decode(deficient, std::vector<double>{1.0, 1.0}, Bits{1, 0}, OsdConfig{});
    CHECK_FALSE(bad.success);
    CHECK_FALSE(bad.pm.is_finite());
}
