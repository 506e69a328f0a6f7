#include <algorithm>

#include "doctest.h"
#include "qgdg/codes.hpp"
#include "qgdg/window.hpp"

using namespace qgdg;

namespace {

CssCode toy_code() {
    CssCode c;
    c.n = 3;
    c.hx = SparseBitMatrix::from_rows(3, {{0, 1}, {1, 2}});
    c.hz = SparseBitMatrix(0, 3);
    c.lz = SparseBitMatrix::from_rows(3, {{0, 1, 2}});
    c.lx = SparseBitMatrix::from_rows(3, {{0, 1, 2}});
    c.k = 1;
    return c;
}

CssCode bb72() {
    return build_bb_code(BivariatePoly::parse(6, 6, "x^3 + y + y^2"), BivariatePoly::parse(6, 6, "y^3 + x + x^2"));
}

Bits column_syndrome(const DetectorModel& m, std::initializer_list<Index> cols) {
    Bits x(m.n_faults(), 0);
    for (Index c : cols) {
        x[c] ^= 1U;
    }
    return matvec(m.h(), x);
}

WindowPlan gdg_plan(std::size_t w, std::size_t f) {
    WindowPlan p;
    p.window = w;
    p.step = f;
    p.inner.gdg = preset_config("n144-circuit");
    return p;
}

}  // namespace

TEST_CASE("window view of the toy model") {
    auto m = build_phenomenological_model(toy_code(), 2, 0.01, 0.01);
    CHECK(m.n_blocks() == 3);
    auto v = window_view(m, 0, 2, 1, false);
    CHECK(v.h.n_rows() == 4);
    CHECK(v.h.n_cols() == 10);
    CHECK(v.columns == std::vector<Index>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
    CHECK(v.commit_columns == std::vector<Index>{0, 1, 2, 3, 4});
    CHECK(v.h.col_weight(8) == 1);
    CHECK(v.h.col_weight(3) == 2);

    auto tail = window_view(m, 1, 3, 1, true);
    CHECK(tail.first_row == 2);
    CHECK(tail.columns == std::vector<Index>{5, 6, 7, 8, 9});
    CHECK(tail.commit_columns == tail.columns);

    auto merged = window_view(m, 0, 2, 1, false, true);
    CHECK(merged.h.n_cols() == 8);
    CHECK(std::count(merged.columns.begin(), merged.columns.end(), kNoColumn) == 2);
    CHECK(merged.commit_columns == std::vector<Index>{0, 1, 2, 3, 4});

    auto global = window_view(m, 0, 3, 1, true);
    CHECK(global.h == m.h());

    CHECK_THROWS_AS(window_view(m, 2, 4, 1, false), ContractError);
    DetectorModel flat(toy_code().hx, std::vector<double>(3, 0.1), SparseBitMatrix(0, 3), std::nullopt);
    CHECK_THROWS_AS(window_view(flat, 0, 1, 1, true), ContractError);
}

TEST_CASE("window ranges") {
    using R = std::vector<std::pair<std::size_t, std::size_t>>;
    CHECK(window_ranges(4, 3, 1) == R{{0, 3}, {1, 4}});
    CHECK(window_ranges(4, 4, 1) == R{{0, 4}});
    CHECK(window_ranges(4, 9, 1) == R{{0, 4}});
    CHECK(window_ranges(7, 5, 2) == R{{0, 5}, {2, 7}});
    CHECK(window_ranges(8, 5, 2) == R{{0, 5}, {2, 7}, {4, 8}});
    auto r18 = window_ranges(19, 3, 1);
    CHECK(r18.size() == 17);
    CHECK(r18.back() == std::pair<std::size_t, std::size_t>{16, 19});
    CHECK_THROWS_AS(window_ranges(5, 3, 3), ContractError);
    CHECK_THROWS_AS(window_ranges(5, 0, 1), ContractError);
}

TEST_CASE("zero syndrome stream") {
    auto m = build_phenomenological_model(bb72(), 3, 0.01, 0.01);
    auto r = sliding_decode(m, Bits(m.n_detectors(), 0), gdg_plan(3, 1));
    CHECK(r.all_windows_success);
    CHECK(r.estimate == Bits(m.n_faults(), 0));
    CHECK(r.windows.size() == 2);
}

TEST_CASE("single measurement fault") {
    auto m = build_phenomenological_model(bb72(), 3, 0.01, 0.01);
    const Index col = 108 + 72 + 5;
    auto s = column_syndrome(m, {col});
    CHECK(std::count(s.begin(), s.end(), 1) == 2);
    auto r = sliding_decode(m, s, gdg_plan(3, 1));
    Bits expect(m.n_faults(), 0);
    expect[col] = 1;
    CHECK(r.estimate == expect);
    CHECK(matvec(m.observables(), r.estimate) == Bits(m.n_observables(), 0));
}

TEST_CASE("sliding equals global on single faults") {
    auto m = build_phenomenological_model(bb72(), 3, 0.01, 0.01);
    auto global = gdg_plan(4, 1);
    auto sliding = gdg_plan(3, 1);
    for (Index c = 0; c < m.n_faults(); c += 5) {
        auto s = column_syndrome(m, {c});
        auto a = sliding_decode(m, s, global);
        auto b = sliding_decode(m, s, sliding);
        CHECK(a.windows.size() == 1);
        CHECK(a.estimate == b.estimate);
        CHECK(matvec(m.h(), b.estimate) == s);
    }
}

TEST_CASE("orchestration matches a from-scratch recomputation") {
    auto m = build_phenomenological_model(bb72(), 5, 0.02, 0.02);
    for (std::size_t f : {1, 2}) {
        auto plan = gdg_plan(3, f);
        plan.inner.kind = DecoderKind::OsdCs;
        plan.inner.osd.bp_iterations = 30;
        for (std::uint64_t seed = 0; seed < 15; ++seed) {
            auto fs = sample(m, seed);
            const Bits s = fs.detectors.to_dense();
            auto r = sliding_decode(m, s, plan);

            Bits committed(m.n_faults(), 0);
            const auto ranges = window_ranges(m.n_blocks(), plan.window, plan.step);
            for (std::size_t k = 0; k < ranges.size(); ++k) {
                const bool last = k + 1 == ranges.size();
                auto view = window_view(m, ranges[k].first, ranges[k].second, plan.step, last);
                Bits residual = matvec(m.h(), committed);
                for (std::size_t i = 0; i < residual.size(); ++i) {
                    residual[i] ^= s[i];
                }
                Bits sw(residual.begin() + static_cast<std::ptrdiff_t>(view.first_row),
                        residual.begin() + static_cast<std::ptrdiff_t>(view.first_row + view.h.n_rows()));
                std::vector<double> llrs;
                for (double p : view.priors) {
                    llrs.push_back(prior_to_llr(p));
                }
                auto inner = decode_inner(view.h, llrs, sw, plan.inner);
                if (!inner.success) {
                    continue;
                }
                for (std::size_t j = 0; j < view.columns.size(); ++j) {
                    const Index c = view.columns[j];
                    if (inner.estimate[j] &&
                        std::find(view.commit_columns.begin(), view.commit_columns.end(), c) !=
                            view.commit_columns.end()) {
                        committed[c] = 1;
                    }
                }
            }
            CHECK(committed == r.estimate);
            if (r.all_windows_success) {
                CHECK(matvec(m.h(), r.estimate) == s);
            }
        }
    }
}

TEST_CASE("last-window override and tail merge") {
    auto m = build_phenomenological_model(bb72(), 4, 0.01, 0.01);
    auto plan = gdg_plan(3, 1);
    InnerDecoder osd;
    osd.kind = DecoderKind::OsdCs;
    plan.last_window_override = osd;
    plan.merge_tail = true;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto fs = sample(m, seed);
        auto r = sliding_decode(m, fs.detectors.to_dense(), plan);
        if (r.all_windows_success) {
            CHECK(matvec(m.h(), r.estimate) == fs.detectors.to_dense());
        }
    }
    CHECK(parse_decoder_kind("osd-cs") == DecoderKind::OsdCs);
    CHECK(decoder_name(DecoderKind::Osd0) == "osd0");
    CHECK_THROWS_AS(parse_decoder_kind("mwpm"), ContractError);
}

TEST_CASE("judging outcomes") {
    auto code = bb72();
    auto m = build_data_qubit_model(code, 0.05);
    auto fs = sample(m, 4);
    const Bits e = fs.errors.to_dense();
    CHECK(judge(m, e, fs) == Outcome::Success);

    Bits zero(m.n_faults(), 0);
    if (!fs.detectors.empty()) {
        CHECK(judge(m, zero, fs) == Outcome::SyndromeFailure);
    }

    bool found_logical = false;
    for (std::size_t r = 0; r < code.lx.n_rows() && !found_logical; ++r) {
        Bits v(m.n_faults(), 0);
        for (Index c : code.lx.row(r)) {
            v[c] = 1;
        }
        const Bits flips = matvec(m.observables(), v);
        if (std::count(flips.begin(), flips.end(), 1) == 0) {
            continue;
        }
        found_logical = true;
        Bits wrong = e;
        for (std::size_t i = 0; i < wrong.size(); ++i) {
            wrong[i] ^= v[i];
        }
        CHECK(judge(m, wrong, fs) == Outcome::LogicalFailure);
    }
    CHECK(found_logical);

    Bits equivalent = e;
    for (Index c : code.hz.row(0)) {
        equivalent[c] ^= 1U;
    }
    CHECK(judge(m, equivalent, fs) == Outcome::Success);
    CHECK(outcome_name(Outcome::LogicalFailure) == "logical_failure");
}
