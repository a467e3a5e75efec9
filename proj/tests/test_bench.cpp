#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "bandblas/bench.hpp"

using namespace bandblas;

namespace {

bench::BenchSpec quick_spec(Routine r, std::string variant, index_t rows,
                            std::vector<index_t> bws) {
    bench::BenchSpec spec;
    spec.routine = r;
    spec.variant = std::move(variant);
    spec.rows = rows;
    spec.bandwidths = std::move(bws);
    spec.repetitions = 3;
    spec.warmup = 0;
    return spec;
}

bench::ClockFn fixed_step_clock(double step) {
    return [t = 0.0, step]() mutable { return t += step; };
}

}  // namespace

TEST_CASE("flops model documented counts") {
    CHECK(bench::flops_model(Routine::gbmv, "N", 3, 3, 1, 1) == 20);
    CHECK(bench::flops_model(Routine::tbsv, "LN", 3, 3, 0, 0) == 3);
    CHECK(bench::flops_model(Routine::sbmv, "lower", 3, 3, 1, 1) == 20);
    CHECK(bench::flops_model(Routine::tbmv, "LN", 3, 3, 0, 0) == 6);
    // rectangular: only the main diagonal stored; output length differs by op
    CHECK(bench::flops_model(Routine::gbmv, "N", 2, 5, 0, 0) == 2 * 2 + 2 * 2);
    CHECK(bench::flops_model(Routine::gbmv, "T", 2, 5, 0, 0) == 2 * 2 + 2 * 5);
}

TEST_CASE("spec validation rejects malformed requests") {
    auto expect_bad = [](bench::BenchSpec spec) {
        CHECK_THROWS_AS(bench::run_bench(spec, default_config(), fixed_step_clock(1e-3)),
                        argument_error);
    };
    auto base = quick_spec(Routine::sbmv, "lower", 50, {2});

    auto s1 = base;
    s1.repetitions = 2;
    expect_bad(s1);
    auto s2 = base;
    s2.bandwidths.clear();
    expect_bad(s2);
    auto s3 = base;
    s3.variant = "N";
    expect_bad(s3);
    auto s4 = base;
    s4.cols = 49;
    expect_bad(s4);
    auto s5 = base;
    s5.bandwidths = {50};  // does not fit n-1
    expect_bad(s5);
    auto s6 = quick_spec(Routine::gbmv, "N", 50, {0});  // gbmv counts stored diagonals
    expect_bad(s6);
}

TEST_CASE("min of repetitions is kept") {
    auto spec = quick_spec(Routine::tbmv, "LN", 20, {1});
    // two clock reads per run; deltas 5, 2, 1 seconds
    std::vector<double> script{0, 5, 10, 12, 20, 21};
    std::size_t at = 0;
    auto clock = [&]() { return script.at(at++); };
    const auto records = bench::run_bench(spec, default_config(), clock);
    REQUIRE(records.size() == 1);
    CHECK(records[0].min_time_s == doctest::Approx(1.0));
}

TEST_CASE("warmup runs are discarded") {
    auto spec = quick_spec(Routine::tbmv, "LN", 20, {1});
    spec.warmup = 1;
    // warmup delta 0.5 must not win; timed deltas are 2, 3, 4
    std::vector<double> script{0, 0.5, 1, 3, 4, 7, 8, 12};
    std::size_t at = 0;
    auto clock = [&]() { return script.at(at++); };
    const auto records = bench::run_bench(spec, default_config(), clock);
    CHECK(records[0].min_time_s == doctest::Approx(2.0));
}

TEST_CASE("a stalled clock still yields positive time") {
    auto spec = quick_spec(Routine::tbmv, "LN", 10, {1});
    const auto records = bench::run_bench(spec, default_config(), [] { return 7.0; });
    CHECK(records[0].min_time_s > 0.0);
}

TEST_CASE("one record per bandwidth with echoed fields") {
    auto spec = quick_spec(Routine::gbmv, "T", 300, {1, 2, 3, 4, 5, 6, 7, 8});
    spec.cols = 200;
    spec.precision = Precision::f32;
    const auto records = bench::run_bench(spec, default_config(), fixed_step_clock(1e-3));
    REQUIRE(records.size() == 8);
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(records[i].routine == Routine::gbmv);
        CHECK(records[i].variant == "T");
        CHECK(records[i].precision == Precision::f32);
        CHECK(records[i].rows == 300);
        CHECK(records[i].cols == 200);
        CHECK(records[i].bandwidth == static_cast<index_t>(i + 1));
        CHECK(records[i].min_time_s > 0);
        CHECK(records[i].mflops > 0);
    }
}

TEST_CASE("baseline and optimized see identical input bytes") {
    for (Routine r : {Routine::gbmv, Routine::tbsv}) {
        auto spec = quick_spec(r, r == Routine::gbmv ? "N" : "LT", 120, {3});
        spec.impl = bench::ImplChoice::baseline;
        const auto base = bench::run_bench(spec, default_config(), fixed_step_clock(1e-3));
        spec.impl = bench::ImplChoice::optimized;
        const auto opti = bench::run_bench(spec, default_config(), fixed_step_clock(1e-3));
        CHECK(base[0].input_digest == opti[0].input_digest);
        CHECK(base[0].input_digest != 0);
        CHECK(base[0].impl_used == Impl::baseline);
        CHECK(opti[0].impl_used == Impl::optimized);
    }
}

TEST_CASE("dispatch runs report the table's choice") {
    auto spec = quick_spec(Routine::gbmv, "N", 200, {3, 25});
    spec.impl = bench::ImplChoice::dispatch;
    const auto records = bench::run_bench(spec, default_config(), fixed_step_clock(1e-3));
    CHECK(records[0].impl_used == Impl::optimized);  // bandwidth 3 <= 19
    CHECK(records[1].impl_used == Impl::baseline);   // bandwidth 25 > 19
}

TEST_CASE("csv output matches the golden schema byte for byte") {
    auto spec = quick_spec(Routine::tbmv, "LN", 10, {1, 2});
    spec.impl = bench::ImplChoice::baseline;
    const auto records = bench::run_bench(spec, default_config(), fixed_step_clock(1e-3));
    std::ostringstream out;
    bench::emit_csv(records, out);
    CHECK(out.str() ==
          "routine,variant,precision,rows,cols,bandwidth,impl,min_time_s,mflops\n"
          "tbmv,LN,f64,10,10,1,baseline,0.001,0.038\n"
          "tbmv,LN,f64,10,10,2,baseline,0.001,0.054\n");
}

TEST_CASE("csv numbers survive a parse-back to 12 digits") {
    auto spec = quick_spec(Routine::sbmv, "upper", 333, {1, 5, 9});
    const auto records = bench::run_bench(spec, default_config(), nullptr);
    std::ostringstream out;
    bench::emit_csv(records, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == bench::kCsvHeader);
    for (const auto& rec : records) {
        REQUIRE(std::getline(in, line));
        const auto last_comma = line.rfind(',');
        const auto prev_comma = line.rfind(',', last_comma - 1);
        const double t = std::stod(line.substr(prev_comma + 1, last_comma - prev_comma - 1));
        const double mf = std::stod(line.substr(last_comma + 1));
        CHECK(std::abs(t - rec.min_time_s) <= 1e-11 * rec.min_time_s);
        CHECK(std::abs(mf - rec.mflops) <= 1e-11 * rec.mflops);
    }
}

TEST_CASE("csv write failure raises io_error") {
    auto spec = quick_spec(Routine::tbmv, "LN", 10, {1});
    const auto records = bench::run_bench(spec, default_config(), fixed_step_clock(1e-3));
    CHECK_THROWS_AS(bench::emit_csv(records, std::string("/nonexistent-dir/out.csv")),
                    bench::io_error);
}

TEST_CASE("autotune recovers a stubbed crossover at bandwidth 8") {
    bench::AutotuneGrid grid;
    grid.bandwidths = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16};
    auto measure = [](const bench::TunePoint& p) {
        if (p.impl == Impl::baseline) return 1.0;
        return p.bandwidth <= 8 ? 0.5 : 2.0;
    };
    const auto result =
        bench::autotune({Routine::gbmv, Routine::sbmv, Routine::tbmv, Routine::tbsv}, grid,
                        measure);
    CHECK(result.warnings.empty());
    for (const auto& [key, threshold] : result.config.thresholds) CHECK(threshold == 8);
}

TEST_CASE("autotune edge shapes") {
    bench::AutotuneGrid grid;
    grid.bandwidths = {1, 2, 3, 4, 5, 6, 7, 8};

    SUBCASE("optimized always wins: grid maximum") {
        const auto result = bench::autotune({Routine::tbmv}, grid,
                                            [](const bench::TunePoint&) { return 1.0; });
        // equal times count as a win for optimized
        CHECK(result.config.thresholds.at("tbmv.LN.f64") == 8);
        CHECK(result.warnings.empty());
    }
    SUBCASE("baseline always wins: zero with a warning") {
        auto measure = [](const bench::TunePoint& p) {
            return p.impl == Impl::baseline ? 1.0 : 2.0;
        };
        const auto result = bench::autotune({Routine::sbmv}, grid, measure);
        CHECK(result.config.thresholds.at("sbmv.lower.f32") == 0);
        CHECK(result.config.thresholds.at("sbmv.upper.f64") == 0);
        CHECK(result.warnings.size() == 4);  // two variants, two precisions
    }
    SUBCASE("the first loss ends the streak even if wins follow") {
        auto measure = [](const bench::TunePoint& p) {
            if (p.impl == Impl::baseline) return 1.0;
            return p.bandwidth == 4 ? 2.0 : 0.5;
        };
        const auto result = bench::autotune({Routine::gbmv}, grid, measure);
        CHECK(result.config.thresholds.at("gbmv.N.f64") == 3);
    }
    SUBCASE("untouched routines keep their defaults") {
        const auto result = bench::autotune({Routine::gbmv}, grid,
                                            [](const bench::TunePoint&) { return 1.0; });
        CHECK(result.config.thresholds.at("tbsv.LT.f64") == kUnlimited);
    }
}

TEST_CASE("verify sweep is clean and trips on injected faults") {
    std::ostringstream sink;
    CHECK(bench::run_verify(1, false, sink) == 0);
    std::ostringstream sink2;
    CHECK(bench::run_verify(1, true, sink2) == 2);
    CHECK(sink2.str().find("FAIL") != std::string::npos);
}
