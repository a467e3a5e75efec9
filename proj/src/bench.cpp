#include "bandblas/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "bandblas/generate.hpp"
#include "bandblas/kernels_baseline.hpp"
#include "bandblas/kernels_optimized.hpp"
#include "bandblas/oracle.hpp"

namespace bandblas::bench {
namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= kFnvPrime;
    }
    return h;
}

template <typename T>
std::uint64_t digest_span(std::uint64_t h, std::span<const T> v) {
    return fnv1a(h, v.data(), v.size_bytes());
}

double steady_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

bool variant_transposed(std::string_view v) { return v == "T" || v == "LT" || v == "UT"; }

Side variant_side(std::string_view v) {
    return (v == "lower" || v == "LN" || v == "LT") ? Side::lower : Side::upper;
}

[[noreturn]] void bad_spec(const std::string& what) { throw argument_error(1, what); }

void validate_spec(const BenchSpec& spec) {
    if (!valid_variant(spec.routine, spec.variant))
        bad_spec("variant '" + spec.variant + "' does not belong to " +
                 std::string(to_string(spec.routine)));
    if (spec.rows < 1) bad_spec("rows must be positive");
    if (spec.repetitions < 3) bad_spec("repetitions must be at least 3");
    if (spec.warmup < 0) bad_spec("warmup must be non-negative");
    if (spec.bandwidths.empty()) bad_spec("bandwidth list must be non-empty");
    if (spec.routine != Routine::gbmv && spec.cols != 0 && spec.cols != spec.rows)
        bad_spec(std::string(to_string(spec.routine)) + " requires a square shape");
    for (index_t b : spec.bandwidths) {
        if (spec.routine == Routine::gbmv) {
            if (b < 1) bad_spec("gbmv bandwidth counts stored diagonals and must be >= 1");
        } else {
            if (b < 0) bad_spec("bandwidth must be non-negative");
            if (b > spec.rows - 1) bad_spec("bandwidth " + std::to_string(b) +
                                            " does not fit a dimension of " +
                                            std::to_string(spec.rows));
        }
    }
}

std::string cell_label(const BenchRecord& rec) {
    std::ostringstream s;
    s << to_string(rec.routine) << ' ' << rec.variant << ' ' << to_string(rec.precision)
      << " rows=" << rec.rows << " cols=" << rec.cols << " bandwidth=" << rec.bandwidth;
    return s.str();
}

/// Runs the oracle gate once, then warmup + repetitions timed runs with the
/// buffer restored (untimed) before each; keeps the minimum.
template <typename T, typename Run, typename Check>
void time_cell(const BenchSpec& spec, const ClockFn& clock, std::span<const T> start, Run&& run,
               Check&& check, BenchRecord& rec) {
    std::vector<T> work(start.begin(), start.end());
    run(std::span<T>(work));
    check(std::span<const T>(work));
    double best = std::numeric_limits<double>::infinity();
    const int total = spec.warmup + spec.repetitions;
    for (int r = 0; r < total; ++r) {
        std::copy(start.begin(), start.end(), work.begin());
        const double t0 = clock();
        run(std::span<T>(work));
        const double t1 = clock();
        if (r >= spec.warmup) best = std::min(best, t1 - t0);
    }
    rec.min_time_s = std::max(best, 1e-12);
}

template <typename T>
BenchRecord run_cell(const BenchSpec& spec, const DispatchConfig& config, const ClockFn& clock,
                     index_t b) {
    using csp = std::span<const T>;
    using sp = std::span<T>;
    const bool transposed = variant_transposed(spec.variant);
    const Side side = variant_side(spec.variant);
    const index_t m = spec.rows;
    const index_t n =
        spec.routine == Routine::gbmv && spec.cols > 0 ? spec.cols : spec.rows;
    const std::uint64_t s0 = spec.seed + 3 * static_cast<std::uint64_t>(b);
    const auto lanes_cfg = detail::for_precision<T>(spec.lanes);
    const index_t lanes = simd::max_lanes(lanes_cfg);

    BenchRecord rec;
    rec.routine = spec.routine;
    rec.variant = spec.variant;
    rec.precision = spec.precision;
    rec.rows = m;
    rec.cols = n;
    rec.bandwidth = b;

    oracle::ToleranceModel model;
    model.eps = epsilon(precision_of_v<T>);

    switch (spec.routine) {
        case Routine::gbmv: {
            const index_t kl = b / 2, ku = (b - 1) / 2;
            auto a = random_general<T>(m, n, kl, ku, s0);
            auto x = random_vector<T>(transposed ? m : n, s0 + 1);
            auto y0 = random_vector<T>(transposed ? n : m, s0 + 2);
            rec.input_digest = digest_span<T>(
                digest_span<T>(digest_span<T>(kFnvOffset, csp(a.data())), csp(x)), csp(y0));
            const T alpha = T(1.25), beta = T(0.75);
            auto run = [&](sp w) {
                const ref::GbmvArgs<T> args{&a, transposed, alpha, beta, csp(x), w};
                switch (spec.impl) {
                    case ImplChoice::baseline:
                        ref::gbmv_ref<T, DefaultEngine>(args, lanes);
                        rec.impl_used = Impl::baseline;
                        break;
                    case ImplChoice::optimized:
                        opt::gbmv_opt<T, DefaultEngine>(args, lanes_cfg);
                        rec.impl_used = Impl::optimized;
                        break;
                    default: {
                        DispatchInfo info;
                        gbmv<T>(a, transposed, alpha, beta, csp(x), w, config, &info);
                        rec.impl_used = info.impl_used;
                    }
                }
            };
            auto check = [&](csp got) {
                std::vector<T> want(y0);
                oracle::banded_gemv_check<T>(a, transposed, alpha, beta, csp(x), sp(want));
                model.norm_scale =
                    oracle::banded_gemv_scale<T>(a, transposed, alpha, beta, csp(x), csp(y0));
                auto r = oracle::compare<T>(got, csp(want), model, kl + ku + 1);
                if (!r.pass) throw correctness_error(cell_label(rec) + ": " + r.describe());
            };
            time_cell<T>(spec, clock, csp(y0), run, check, rec);
            rec.mflops = static_cast<double>(
                             flops_model(spec.routine, spec.variant, m, n, kl, ku)) /
                         rec.min_time_s / 1e6;
            break;
        }
        case Routine::sbmv: {
            auto a = random_symmetric<T>(n, b, side, s0);
            auto x = random_vector<T>(n, s0 + 1);
            auto y0 = random_vector<T>(n, s0 + 2);
            rec.input_digest = digest_span<T>(
                digest_span<T>(digest_span<T>(kFnvOffset, csp(a.data())), csp(x)), csp(y0));
            const T alpha = T(1.25), beta = T(0.75);
            auto run = [&](sp w) {
                switch (spec.impl) {
                    case ImplChoice::baseline:
                        ref::sbmv_ref<T, DefaultEngine>(a, alpha, beta, csp(x), w, lanes);
                        rec.impl_used = Impl::baseline;
                        break;
                    case ImplChoice::optimized:
                        opt::sbmv_opt<T, DefaultEngine>(a, alpha, beta, csp(x), w, lanes_cfg);
                        rec.impl_used = Impl::optimized;
                        break;
                    default: {
                        DispatchInfo info;
                        sbmv<T>(a, alpha, beta, csp(x), w, config, &info);
                        rec.impl_used = info.impl_used;
                    }
                }
            };
            auto check = [&](csp got) {
                std::vector<T> want(y0);
                oracle::banded_symv_check<T>(a, alpha, beta, csp(x), sp(want));
                model.norm_scale = oracle::banded_symv_scale<T>(a, alpha, beta, csp(x), csp(y0));
                auto r = oracle::compare<T>(got, csp(want), model, 2 * b + 1);
                if (!r.pass) throw correctness_error(cell_label(rec) + ": " + r.describe());
            };
            time_cell<T>(spec, clock, csp(y0), run, check, rec);
            rec.mflops = static_cast<double>(flops_model(spec.routine, spec.variant, n, n, b, b)) /
                         rec.min_time_s / 1e6;
            break;
        }
        case Routine::tbmv: {
            auto a = random_triangular<T>(n, b, side, s0, false, transposed);
            auto x0 = random_vector<T>(n, s0 + 1);
            rec.input_digest =
                digest_span<T>(digest_span<T>(kFnvOffset, csp(a.data())), csp(x0));
            auto run = [&](sp w) {
                switch (spec.impl) {
                    case ImplChoice::baseline:
                        ref::tbmv_ref<T, DefaultEngine>(a, w, lanes);
                        rec.impl_used = Impl::baseline;
                        break;
                    case ImplChoice::optimized:
                        opt::tbmv_opt<T, DefaultEngine>(a, w, lanes_cfg);
                        rec.impl_used = Impl::optimized;
                        break;
                    default: {
                        DispatchInfo info;
                        tbmv<T>(a, w, config, &info);
                        rec.impl_used = info.impl_used;
                    }
                }
            };
            auto check = [&](csp got) {
                std::vector<T> want(static_cast<std::size_t>(n));
                oracle::banded_trmv_check<T>(a, csp(x0), sp(want));
                model.norm_scale = oracle::banded_trmv_scale<T>(a, csp(x0));
                auto r = oracle::compare<T>(got, csp(want), model, b + 1);
                if (!r.pass) throw correctness_error(cell_label(rec) + ": " + r.describe());
            };
            time_cell<T>(spec, clock, csp(x0), run, check, rec);
            rec.mflops = static_cast<double>(flops_model(spec.routine, spec.variant, n, n, b, b)) /
                         rec.min_time_s / 1e6;
            break;
        }
        default: {  // tbsv
            auto a = random_triangular<T>(n, b, side, s0, /*solvable=*/true, transposed);
            auto b0 = random_vector<T>(n, s0 + 1);
            rec.input_digest =
                digest_span<T>(digest_span<T>(kFnvOffset, csp(a.data())), csp(b0));
            auto run = [&](sp w) {
                switch (spec.impl) {
                    case ImplChoice::baseline:
                        ref::tbsv_ref<T, DefaultEngine>(a, w, lanes);
                        rec.impl_used = Impl::baseline;
                        break;
                    case ImplChoice::optimized:
                        opt::tbsv_opt<T, DefaultEngine>(a, w, lanes_cfg);
                        rec.impl_used = Impl::optimized;
                        break;
                    default: {
                        DispatchInfo info;
                        tbsv<T>(a, w, config, &info);
                        rec.impl_used = info.impl_used;
                    }
                }
            };
            auto check = [&](csp got) {
                double res = 0, bound = 0;
                if (!oracle::banded_trsv_residual_check<T>(a, got, csp(b0), &res, &bound)) {
                    std::ostringstream s;
                    s << cell_label(rec) << ": residual " << res << " exceeds bound " << bound;
                    throw correctness_error(s.str());
                }
            };
            time_cell<T>(spec, clock, csp(b0), run, check, rec);
            rec.mflops = static_cast<double>(flops_model(spec.routine, spec.variant, n, n, b, b)) /
                         rec.min_time_s / 1e6;
            break;
        }
    }
    return rec;
}

std::vector<index_t> default_grid(Routine r) {
    std::vector<index_t> bws;
    for (index_t b = 1; b <= (r == Routine::tbsv ? 51 : 32); ++b) bws.push_back(b);
    return bws;
}

}  // namespace

bool parse_impl(std::string_view name, ImplChoice& out) {
    if (name == "baseline") out = ImplChoice::baseline;
    else if (name == "optimized") out = ImplChoice::optimized;
    else if (name == "dispatch") out = ImplChoice::dispatch;
    else return false;
    return true;
}

index_t flops_model(Routine routine, std::string_view variant, index_t m, index_t n, index_t kl,
                    index_t ku) {
    if (m <= 0 || n <= 0) return 0;
    const auto band_count = [](index_t rows, index_t cols, index_t lo, index_t up) {
        index_t c = 0;
        for (index_t j = 0; j < cols; ++j) {
            const index_t r0 = std::max<index_t>(0, j - up);
            const index_t r1 = std::min<index_t>(rows - 1, j + lo);
            if (r1 >= r0) c += r1 - r0 + 1;
        }
        return c;
    };
    switch (routine) {
        case Routine::gbmv: {
            const index_t out_len = variant_transposed(variant) ? n : m;
            return 2 * band_count(m, n, kl, ku) + 2 * out_len;
        }
        case Routine::sbmv: {
            const index_t off = band_count(n, n, kl, 0) - n;
            return 2 * (n + 2 * off) + 2 * n;
        }
        case Routine::tbmv:
            return 2 * band_count(n, n, kl, 0);
        default:  // tbsv: off-diagonal multiply-adds plus one division per row
            return 2 * (band_count(n, n, kl, 0) - n) + n;
    }
}

std::vector<BenchRecord> run_bench(const BenchSpec& spec, const DispatchConfig& config,
                                   ClockFn clock) {
    validate_spec(spec);
    simd::max_lanes(spec.lanes);  // surfaces invalid lane shapes before any work
    if (!clock) clock = steady_seconds;
    std::vector<BenchRecord> records;
    records.reserve(spec.bandwidths.size());
    for (index_t b : spec.bandwidths)
        records.push_back(spec.precision == Precision::f32
                              ? run_cell<float>(spec, config, clock, b)
                              : run_cell<double>(spec, config, clock, b));
    return records;
}

void emit_csv(const std::vector<BenchRecord>& records, std::ostream& out) {
    out << kCsvHeader << '\n';
    char buf[64];
    for (const auto& r : records) {
        out << to_string(r.routine) << ',' << r.variant << ',' << to_string(r.precision) << ','
            << r.rows << ',' << r.cols << ',' << r.bandwidth << ',' << to_string(r.impl_used)
            << ',';
        std::snprintf(buf, sizeof buf, "%.12g", r.min_time_s);
        out << buf << ',';
        std::snprintf(buf, sizeof buf, "%.12g", r.mflops);
        out << buf << '\n';
    }
    if (!out) throw io_error("failed writing CSV stream");
}

void emit_csv(const std::vector<BenchRecord>& records, const std::string& path) {
    std::ofstream file(path);
    if (!file) throw io_error("cannot open '" + path + "' for writing");
    emit_csv(records, file);
    file.flush();
    if (!file) throw io_error("failed writing '" + path + "'");
}

AutotuneResult autotune(const std::vector<Routine>& routines, const AutotuneGrid& grid,
                        MeasureFn measure) {
    AutotuneResult result;
    result.config = default_config();
    if (!measure) {
        measure = [&grid](const TunePoint& p) {
            BenchSpec spec;
            spec.routine = p.routine;
            spec.variant = p.variant;
            spec.precision = p.precision;
            spec.rows = grid.rows;
            spec.bandwidths = {p.bandwidth};
            spec.repetitions = std::max(grid.repetitions, 3);
            spec.warmup = grid.warmup;
            spec.impl = p.impl == Impl::baseline ? ImplChoice::baseline : ImplChoice::optimized;
            spec.seed = grid.seed;
            const DispatchConfig dc = default_config();
            spec.lanes = p.routine == Routine::tbsv ? dc.tbsv_lanes : dc.mv_lanes;
            return run_bench(spec).front().min_time_s;
        };
    }
    for (Routine r : routines) {
        std::vector<index_t> bws = grid.bandwidths.empty() ? default_grid(r) : grid.bandwidths;
        std::sort(bws.begin(), bws.end());
        for (auto variant : variants_of(r)) {
            for (Precision p : {Precision::f32, Precision::f64}) {
                index_t best = -1;
                for (index_t bw : bws) {
                    const double base =
                        measure({r, std::string(variant), p, bw, Impl::baseline});
                    const double opti =
                        measure({r, std::string(variant), p, bw, Impl::optimized});
                    if (opti <= base)
                        best = bw;
                    else
                        break;  // first crossover wins
                }
                const std::string key = threshold_key(r, variant, p);
                if (best < 0) {
                    result.config.thresholds[key] = 0;
                    result.warnings.push_back("optimized never beat baseline for " + key +
                                              "; writing threshold 0");
                } else {
                    result.config.thresholds[key] = best;
                }
            }
        }
    }
    return result;
}

namespace {

template <typename T>
bool verify_cell(Routine routine, std::string_view variant, ImplChoice impl, index_t n, index_t b,
                 std::uint64_t seed, bool inject_fault, std::ostream& log) {
    BenchSpec spec;
    spec.routine = routine;
    spec.variant = std::string(variant);
    spec.precision = precision_of_v<T>;
    spec.rows = n;
    spec.bandwidths = {b};
    spec.repetitions = 3;
    spec.warmup = 0;
    spec.impl = impl;
    spec.seed = seed;
    const DispatchConfig dc = default_config();
    spec.lanes = routine == Routine::tbsv ? dc.tbsv_lanes : dc.mv_lanes;
    if (!inject_fault) {
        try {
            run_bench(spec, dc, [] { return 0.0; });
            return true;
        } catch (const correctness_error& e) {
            log << "[verify] FAIL " << e.what() << '\n';
            return false;
        }
    }
    // Fault injection stands in for a corrupted kernel build: run the kernel,
    // corrupt its output, and push the result through the normal oracle gate,
    // which is then expected to fail the cell.
    const bool transposed = variant_transposed(variant);
    const Side side = variant_side(variant);
    const std::uint64_t s0 = seed + 3 * static_cast<std::uint64_t>(b);
    const auto lanes_cfg = detail::for_precision<T>(spec.lanes);
    const index_t lanes = simd::max_lanes(lanes_cfg);
    const bool use_opt = impl == ImplChoice::optimized;
    using csp = std::span<const T>;
    oracle::ToleranceModel model;
    model.eps = epsilon(precision_of_v<T>);
    bool pass = true;
    const auto corrupt = [](std::span<T> w) {
        w[0] += std::max(T(1), std::abs(w[0]));
    };
    switch (routine) {
        case Routine::gbmv: {
            const index_t kl = b / 2, ku = (b - 1) / 2;
            auto a = random_general<T>(n, n, kl, ku, s0);
            auto x = random_vector<T>(n, s0 + 1);
            auto y = random_vector<T>(n, s0 + 2);
            const auto y0 = y;
            const ref::GbmvArgs<T> args{&a, transposed, T(1.25), T(0.75), csp(x),
                                        std::span<T>(y)};
            if (use_opt)
                opt::gbmv_opt<T, DefaultEngine>(args, lanes_cfg);
            else
                ref::gbmv_ref<T, DefaultEngine>(args, lanes);
            corrupt(std::span<T>(y));
            std::vector<T> want(y0);
            oracle::banded_gemv_check<T>(a, transposed, T(1.25), T(0.75), csp(x),
                                         std::span<T>(want));
            model.norm_scale =
                oracle::banded_gemv_scale<T>(a, transposed, T(1.25), T(0.75), csp(x), csp(y0));
            pass = oracle::compare<T>(csp(y), csp(want), model, kl + ku + 1).pass;
            break;
        }
        case Routine::sbmv: {
            auto a = random_symmetric<T>(n, b, side, s0);
            auto x = random_vector<T>(n, s0 + 1);
            auto y = random_vector<T>(n, s0 + 2);
            const auto y0 = y;
            if (use_opt)
                opt::sbmv_opt<T, DefaultEngine>(a, T(1.25), T(0.75), csp(x), std::span<T>(y),
                                                lanes_cfg);
            else
                ref::sbmv_ref<T, DefaultEngine>(a, T(1.25), T(0.75), csp(x), std::span<T>(y),
                                                lanes);
            corrupt(std::span<T>(y));
            std::vector<T> want(y0);
            oracle::banded_symv_check<T>(a, T(1.25), T(0.75), csp(x), std::span<T>(want));
            model.norm_scale =
                oracle::banded_symv_scale<T>(a, T(1.25), T(0.75), csp(x), csp(y0));
            pass = oracle::compare<T>(csp(y), csp(want), model, 2 * b + 1).pass;
            break;
        }
        case Routine::tbmv: {
            auto a = random_triangular<T>(n, b, side, s0, false, transposed);
            auto x0 = random_vector<T>(n, s0 + 1);
            auto x = x0;
            if (use_opt)
                opt::tbmv_opt<T, DefaultEngine>(a, std::span<T>(x), lanes_cfg);
            else
                ref::tbmv_ref<T, DefaultEngine>(a, std::span<T>(x), lanes);
            corrupt(std::span<T>(x));
            std::vector<T> want(static_cast<std::size_t>(n));
            oracle::banded_trmv_check<T>(a, csp(x0), std::span<T>(want));
            model.norm_scale = oracle::banded_trmv_scale<T>(a, csp(x0));
            pass = oracle::compare<T>(csp(x), csp(want), model, b + 1).pass;
            break;
        }
        default: {
            auto a = random_triangular<T>(n, b, side, s0, true, transposed);
            auto b0 = random_vector<T>(n, s0 + 1);
            auto x = b0;
            if (use_opt)
                opt::tbsv_opt<T, DefaultEngine>(a, std::span<T>(x), lanes_cfg);
            else
                ref::tbsv_ref<T, DefaultEngine>(a, std::span<T>(x), lanes);
            corrupt(std::span<T>(x));
            pass = oracle::banded_trsv_residual_check<T>(a, csp(x), csp(b0));
            break;
        }
    }
    if (!pass)
        log << "[verify] FAIL " << to_string(routine) << ' ' << variant << ' '
            << to_string(precision_of_v<T>) << " n=" << n << " bandwidth=" << b
            << ": output rejected by oracle\n";
    return pass;
}

}  // namespace

int run_verify(std::uint64_t seed, bool inject_fault, std::ostream& log) {
    constexpr index_t kSizes[] = {1, 2, 7, 23, 64};
    constexpr index_t kBands[] = {0, 1, 2, 5, 8};
    int cells = 0, failures = 0;
    for (Routine r : {Routine::gbmv, Routine::sbmv, Routine::tbmv, Routine::tbsv}) {
        for (auto variant : variants_of(r)) {
            for (ImplChoice impl : {ImplChoice::baseline, ImplChoice::optimized}) {
                for (index_t n : kSizes) {
                    for (index_t b : kBands) {
                        if (r == Routine::gbmv && b < 1) continue;
                        if (r != Routine::gbmv && b > n - 1) continue;
                        for (int fp = 0; fp < 2; ++fp) {
                            ++cells;
                            const bool ok =
                                fp == 0 ? verify_cell<float>(r, variant, impl, n, b, seed,
                                                             inject_fault, log)
                                        : verify_cell<double>(r, variant, impl, n, b, seed,
                                                              inject_fault, log);
                            if (!ok) ++failures;
                        }
                    }
                }
            }
        }
    }
    log << "[verify] " << cells << " cells, " << failures << " failure"
        << (failures == 1 ? "" : "s") << (inject_fault ? " (fault injection active)" : "")
        << '\n';
    return failures == 0 ? 0 : 2;
}

}  // namespace bandblas::bench
