#pragma once
// Measurement harness: min-of-runs timing over bandwidth grids, MFLOPS
// normalization, CSV emission, and empirical recovery of the dispatch
// thresholds.  The clock and the per-point timer are injectable so the CSV
// schema and the crossover search stay testable without real hardware noise.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bandblas/dispatch.hpp"

namespace bandblas::bench {

/// Kernel output failed the oracle gate that runs before timing.
class correctness_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// File could not be opened or written.
class io_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Which implementation the harness drives; `dispatch` lets the threshold
/// table decide per cell.
enum class ImplChoice { baseline, optimized, dispatch };

constexpr const char* to_string(ImplChoice c) {
    switch (c) {
        case ImplChoice::baseline: return "baseline";
        case ImplChoice::optimized: return "optimized";
        default: return "dispatch";
    }
}

/// Returns false when `name` is not baseline/optimized/dispatch.
bool parse_impl(std::string_view name, ImplChoice& out);

/// One benchmark request.  `bandwidths` holds stored-diagonal counts for gbmv
/// (kl = ceil((b-1)/2), ku = floor((b-1)/2)) and half-bandwidths k for the
/// square routines.  `lanes` shapes the forced baseline/optimized runs; the
/// dispatch selector uses the DispatchConfig's own lane fields.
struct BenchSpec {
    Routine routine = Routine::gbmv;
    std::string variant = "N";
    Precision precision = Precision::f64;
    index_t rows = 100000;
    index_t cols = 0;  // 0: square
    std::vector<index_t> bandwidths;
    int repetitions = 10;
    int warmup = 2;
    ImplChoice impl = ImplChoice::dispatch;
    simd::LaneConfig lanes{128, 4, Precision::f64};
    std::uint64_t seed = 1;
};

/// One measured cell.  input_digest hashes the generated bytes, so two runs
/// of the same spec/seed with different impl selectors must report the same
/// digest; it does not appear in the CSV.
struct BenchRecord {
    Routine routine = Routine::gbmv;
    std::string variant;
    Precision precision = Precision::f64;
    index_t rows = 0;
    index_t cols = 0;
    index_t bandwidth = 0;
    Impl impl_used = Impl::baseline;
    double min_time_s = 0;
    double mflops = 0;
    std::uint64_t input_digest = 0;
};

/// Flops for one application: 2 per stored element op(A) touches, plus 2 per
/// output element of alpha/beta scaling for the multiply routines, plus one
/// division per row for the solve.  Symmetric storage counts the mirrored
/// triangle too.  The square routines read their half-bandwidth from kl.
index_t flops_model(Routine routine, std::string_view variant, index_t m, index_t n, index_t kl,
                    index_t ku);

/// Monotonic seconds source; default reads the steady clock.
using ClockFn = std::function<double()>;

/// Runs one record per bandwidth: generate inputs from the seed, gate the
/// selected implementation's output through the oracle, then time
/// `repetitions` runs after `warmup` discards and keep the minimum.  Buffer
/// restoration, generation, and oracle checks all sit outside the timed
/// region.  Throws argument_error for a malformed spec and correctness_error
/// when the oracle gate fails.
std::vector<BenchRecord> run_bench(const BenchSpec& spec,
                                   const DispatchConfig& config = default_config(),
                                   ClockFn clock = {});

inline constexpr const char* kCsvHeader =
    "routine,variant,precision,rows,cols,bandwidth,impl,min_time_s,mflops";

/// Writes the header plus one line per record; numeric fields carry 12
/// significant digits so a parse-back recovers them exactly.
void emit_csv(const std::vector<BenchRecord>& records, std::ostream& out);
void emit_csv(const std::vector<BenchRecord>& records, const std::string& path);

/// One timing request the autotuner issues.
struct TunePoint {
    Routine routine = Routine::gbmv;
    std::string variant;
    Precision precision = Precision::f64;
    index_t bandwidth = 0;
    Impl impl = Impl::baseline;
};

/// Returns min_time seconds for the point; injectable for stubbed searches.
using MeasureFn = std::function<double(const TunePoint&)>;

struct AutotuneGrid {
    index_t rows = 50000;
    std::vector<index_t> bandwidths;  // empty: 1..32, or 1..51 for the solve
    int repetitions = 3;
    int warmup = 1;
    std::uint64_t seed = 1;
};

struct AutotuneResult {
    DispatchConfig config;              // defaults with the tuned keys overwritten
    std::vector<std::string> warnings;  // combos where optimized never won
};

/// For every routine/variant/precision in `routines`, walks the bandwidth
/// grid upward and records the largest bandwidth of the initial streak where
/// optimized min_time <= baseline min_time (ties keep the streak alive; the
/// first loss ends the search).  A loss at the first point writes 0 with a
/// warning; an unbroken streak writes the grid maximum.
AutotuneResult autotune(const std::vector<Routine>& routines, const AutotuneGrid& grid,
                        MeasureFn measure = {});

/// Correctness sweep behind the `verify` subcommand: every routine, variant,
/// precision, and implementation over a small size/bandwidth grid, gated by
/// the oracle.  Returns 0 on success, 2 on any mismatch.  `inject_fault`
/// perturbs each output before checking, to prove the gate trips.
int run_verify(std::uint64_t seed, bool inject_fault, std::ostream& log);

}  // namespace bandblas::bench
