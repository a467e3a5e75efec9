#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <string>
#include <vector>

#include "bandblas/dispatch.hpp"
#include "bandblas/generate.hpp"
#include "bandblas/oracle.hpp"
#include "test_util.hpp"

using namespace bandblas;

namespace {

DispatchConfig with_threshold(const std::string& key, index_t value) {
    auto cfg = default_config();
    cfg.thresholds[key] = value;
    return cfg;
}

DispatchConfig all_thresholds(index_t value) {
    auto cfg = default_config();
    for (auto& [key, t] : cfg.thresholds) t = value;
    return cfg;
}

}  // namespace

TEST_CASE("threshold keys and variant names") {
    CHECK(threshold_key(Routine::gbmv, "N", Precision::f64) == "gbmv.N.f64");
    CHECK(threshold_key(Routine::tbsv, "UT", Precision::f32) == "tbsv.UT.f32");
    CHECK(valid_variant(Routine::gbmv, "T"));
    CHECK_FALSE(valid_variant(Routine::gbmv, "lower"));
    CHECK(valid_variant(Routine::sbmv, "upper"));
    CHECK(valid_variant(Routine::tbmv, "LT"));
    CHECK_FALSE(valid_variant(Routine::tbsv, "X"));
}

TEST_CASE("default threshold table is exactly the shipped tuning") {
    const index_t U = kUnlimited;
    const std::map<std::string, index_t> want{
        {"gbmv.N.f32", 13},   {"gbmv.N.f64", 19},   {"gbmv.T.f32", 13},   {"gbmv.T.f64", 19},
        {"sbmv.lower.f32", 19}, {"sbmv.lower.f64", 13}, {"sbmv.upper.f32", 19}, {"sbmv.upper.f64", 13},
        {"tbmv.LN.f32", 6},   {"tbmv.LN.f64", 6},   {"tbmv.UN.f32", 6},   {"tbmv.UN.f64", 6},
        {"tbmv.LT.f32", U},   {"tbmv.LT.f64", U},   {"tbmv.UT.f32", U},   {"tbmv.UT.f64", U},
        {"tbsv.LN.f32", U},   {"tbsv.LN.f64", U},   {"tbsv.LT.f32", U},   {"tbsv.LT.f64", U},
        {"tbsv.UN.f32", U},   {"tbsv.UN.f64", U},   {"tbsv.UT.f32", U},   {"tbsv.UT.f64", U},
    };
    const auto got = default_config().thresholds;
    CHECK(got.size() == 24);
    CHECK(got == want);
}

TEST_CASE("default lane shapes") {
    const auto cfg = default_config();
    CHECK(simd::lanes_for<double>(cfg.mv_lanes) == 8);
    CHECK(simd::lanes_for<double>(cfg.tbsv_lanes) == 2);
    CHECK(simd::lanes_for<float>(cfg.mv_lanes) == 16);
}

TEST_CASE("selection is inclusive at the threshold") {
    const auto cfg = default_config();
    CHECK(select_impl(Routine::gbmv, "N", Precision::f64, 8, cfg) == Impl::optimized);
    CHECK(select_impl(Routine::gbmv, "N", Precision::f64, 19, cfg) == Impl::optimized);
    CHECK(select_impl(Routine::gbmv, "N", Precision::f64, 20, cfg) == Impl::baseline);
    CHECK(select_impl(Routine::gbmv, "N", Precision::f32, 13, cfg) == Impl::optimized);
    CHECK(select_impl(Routine::gbmv, "N", Precision::f32, 14, cfg) == Impl::baseline);
    CHECK(select_impl(Routine::sbmv, "lower", Precision::f64, 13, cfg) == Impl::optimized);
    CHECK(select_impl(Routine::sbmv, "lower", Precision::f64, 14, cfg) == Impl::baseline);
    CHECK(select_impl(Routine::tbmv, "LN", Precision::f64, 6, cfg) == Impl::optimized);
    CHECK(select_impl(Routine::tbmv, "LN", Precision::f64, 7, cfg) == Impl::baseline);
    CHECK(select_impl(Routine::tbmv, "LT", Precision::f64, 100000, cfg) == Impl::optimized);
    CHECK(select_impl(Routine::tbsv, "UT", Precision::f32, 3, cfg) == Impl::optimized);

    const auto zero = with_threshold("tbmv.LN.f64", 0);
    CHECK(select_impl(Routine::tbmv, "LN", Precision::f64, 0, zero) == Impl::optimized);
    CHECK(select_impl(Routine::tbmv, "LN", Precision::f64, 1, zero) == Impl::baseline);
}

TEST_CASE("missing table entries fall back sensibly") {
    DispatchConfig bare;  // empty thresholds: shipped defaults apply
    CHECK(select_impl(Routine::gbmv, "N", Precision::f64, 8, bare) == Impl::optimized);
    CHECK(select_impl(Routine::gbmv, "N", Precision::f64, 40, bare) == Impl::baseline);
    // a key outside the table resolves to the safe choice
    CHECK(select_impl(Routine::gbmv, "Z", Precision::f64, 1, bare) == Impl::baseline);
}

TEST_CASE("config text parsing") {
    SUBCASE("empty text reproduces the defaults") {
        const auto cfg = load_config("");
        CHECK(serialize_config(cfg) == serialize_config(default_config()));
    }
    SUBCASE("overrides, comments, and spacing") {
        const auto cfg = load_config(
            "# tuned on one box\n"
            "\n"
            "gbmv.N.f64 = 8\n"
            "tbsv.LN.f32=5\n"
            "tbmv.LN.f64 = unlimited   # wide open\n");
        CHECK(cfg.thresholds.at("gbmv.N.f64") == 8);
        CHECK(cfg.thresholds.at("tbsv.LN.f32") == 5);
        CHECK(cfg.thresholds.at("tbmv.LN.f64") == kUnlimited);
        CHECK(cfg.thresholds.at("gbmv.T.f64") == 19);  // untouched entries keep defaults
    }
    SUBCASE("missing trailing newline") {
        const auto cfg = load_config("sbmv.upper.f32 = 2");
        CHECK(cfg.thresholds.at("sbmv.upper.f32") == 2);
    }
    SUBCASE("unknown key reports the line") {
        try {
            load_config("gbmv.N.f64 = 8\n\nbogus.key.f64 = 3\n");
            FAIL("expected config_error");
        } catch (const config_error& e) {
            CHECK(std::string(e.what()).find("line 3") != std::string::npos);
            CHECK(std::string(e.what()).find("bogus.key.f64") != std::string::npos);
        }
    }
    SUBCASE("malformed values are rejected") {
        CHECK_THROWS_AS(load_config("gbmv.N.f64 = twelve\n"), config_error);
        CHECK_THROWS_AS(load_config("gbmv.N.f64 = -3\n"), config_error);
        CHECK_THROWS_AS(load_config("gbmv.N.f64\n"), config_error);
    }
}

TEST_CASE("serialization round-trips losslessly") {
    const auto first = serialize_config(default_config());
    CHECK(first.find("tbsv.UT.f64 = 9223372036854775807") != std::string::npos);
    const auto reparsed = load_config(first);
    CHECK(serialize_config(reparsed) == first);

    auto tweaked = with_threshold("sbmv.lower.f64", 7);
    const auto text = serialize_config(tweaked);
    CHECK(serialize_config(load_config(text)) == text);
}

TEST_CASE("gbmv dispatch reports its decision") {
    auto a = random_general<double>(50, 50, 2, 2, 1);
    auto x = random_vector<double>(50, 2);
    auto y = random_vector<double>(50, 3);
    DispatchInfo info;
    gbmv<double>(a, false, 1.0, 0.0, x, y, default_config(), &info);
    CHECK(info.impl_used == Impl::optimized);
    CHECK(info.bandwidth == 5);
    CHECK(info.key == "gbmv.N.f64");

    auto wide = random_general<double>(50, 50, 10, 9, 4);
    gbmv<double>(wide, true, 1.0, 0.0, x, y, default_config(), &info);
    CHECK(info.impl_used == Impl::baseline);
    CHECK(info.bandwidth == 20);
    CHECK(info.key == "gbmv.T.f64");
}

TEST_CASE("tbmv and tbsv dispatch honor the transposed thresholds") {
    auto a = random_triangular<double>(40, 7, Side::lower, 5, false, /*transposed=*/false);
    auto x = random_vector<double>(40, 6);
    DispatchInfo info;
    auto xi = x;
    tbmv<double>(a, xi, default_config(), &info);
    CHECK(info.impl_used == Impl::baseline);  // LN threshold 6, bandwidth 7
    CHECK(info.key == "tbmv.LN.f64");

    a.set_transposed(true);
    xi = x;
    tbmv<double>(a, xi, default_config(), &info);
    CHECK(info.impl_used == Impl::optimized);  // LT unlimited
    CHECK(info.key == "tbmv.LT.f64");

    auto u = random_triangular<double>(40, 3, Side::upper, 7, true, /*transposed=*/true);
    auto b = random_vector<double>(40, 8);
    tbsv<double>(u, b, default_config(), &info);
    CHECK(info.impl_used == Impl::optimized);
    CHECK(info.bandwidth == 3);
    CHECK(info.key == "tbsv.UT.f64");
}

TEST_CASE("forced implementations agree within tolerance") {
    const auto force_opt = all_thresholds(kUnlimited);
    const auto force_base = all_thresholds(0);
    oracle::ToleranceModel model;

    auto a = random_general<double>(64, 64, 3, 3, 11);
    auto x = random_vector<double>(64, 12);
    auto y0 = random_vector<double>(64, 13);
    auto yb = y0, yo = y0;
    DispatchInfo ib, io;
    gbmv<double>(a, false, 1.5, -0.5, x, yb, force_base, &ib);
    gbmv<double>(a, false, 1.5, -0.5, x, yo, force_opt, &io);
    CHECK(ib.impl_used == Impl::baseline);
    CHECK(io.impl_used == Impl::optimized);
    model.norm_scale = oracle::banded_gemv_scale<double>(a, false, 1.5, -0.5, x, y0);
    CHECK(oracle::compare<double>(yo, yb, model, 7).pass);

    auto t = random_triangular<double>(64, 4, Side::upper, 14, true);
    auto b0 = random_vector<double>(64, 15);
    auto bb = b0, bo = b0;
    tbsv<double>(t, bb, force_base, &ib);
    tbsv<double>(t, bo, force_opt, &io);
    CHECK(ib.impl_used == Impl::baseline);
    CHECK(io.impl_used == Impl::optimized);
    model.norm_scale = oracle::uniform_scale<double>(bb);
    CHECK(oracle::compare<double>(bo, bb, model, 5).pass);
}

TEST_CASE("argument errors pass through dispatch unchanged") {
    auto a = random_general<double>(10, 10, 1, 1, 21);
    auto x = random_vector<double>(9, 22);  // wrong length
    auto y = random_vector<double>(10, 23);
    try {
        gbmv<double>(a, false, 1.0, 0.0, x, y);
        FAIL("expected argument_error");
    } catch (const argument_error& e) {
        CHECK(e.parameter_index() == 5);
    }
}
