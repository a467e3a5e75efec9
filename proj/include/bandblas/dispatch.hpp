#pragma once

#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "bandblas/band_matrix.hpp"
#include "bandblas/kernels_baseline.hpp"
#include "bandblas/kernels_optimized.hpp"
#include "bandblas/types.hpp"
#include "bandblas/vector_engine.hpp"

namespace bandblas {

#if BANDBLAS_HAVE_NATIVE_SIMD
using DefaultEngine = simd::NativeEngine;
#else
using DefaultEngine = simd::ScalarEngine;
#endif

enum class Routine { gbmv, sbmv, tbmv, tbsv };
enum class Impl { baseline, optimized };

constexpr const char* to_string(Routine r) {
    switch (r) {
        case Routine::gbmv: return "gbmv";
        case Routine::sbmv: return "sbmv";
        case Routine::tbmv: return "tbmv";
        default: return "tbsv";
    }
}
constexpr const char* to_string(Impl i) { return i == Impl::baseline ? "baseline" : "optimized"; }

/// Threshold value meaning "optimized for every bandwidth".
inline constexpr index_t kUnlimited = std::numeric_limits<index_t>::max();

class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Per-routine/variant/precision bandwidth thresholds (optimized chosen for
/// bandwidth <= threshold) plus the lane configurations of the two kernel
/// families.  Missing map entries fall back to the built-in defaults.
struct DispatchConfig {
    std::map<std::string, index_t> thresholds;
    simd::LaneConfig mv_lanes{128, 4, Precision::f64};    // gbmv/sbmv/tbmv family
    simd::LaneConfig tbsv_lanes{128, 1, Precision::f64};  // narrower solve grouping
};

/// "routine.variant.precision", e.g. "gbmv.N.f64" or "tbmv.LT.f32".
std::string threshold_key(Routine routine, std::string_view variant, Precision precision);

/// A routine's variant vocabulary (N/T, lower/upper, or LN/LT/UN/UT) in
/// serialization order.
std::span<const std::string_view> variants_of(Routine routine);

/// True when `variant` belongs to `routine`'s vocabulary.
bool valid_variant(Routine routine, std::string_view variant);

/// Thresholds seeded from the reported crossovers; unlisted combinations
/// mirror their measured sibling (transposed copies non-transposed, UN
/// copies LN).
DispatchConfig default_config();

/// Parses the line-oriented `key = integer` format ('#' comments, blank
/// lines, the word "unlimited" allowed as a value) over the defaults.
/// Unknown keys or malformed lines raise config_error naming the line.
DispatchConfig load_config(std::string_view text);

/// Canonical text form: every threshold as `key = integer` in fixed routine
/// order; parse(serialize(c)) == c.
std::string serialize_config(const DispatchConfig& config);

/// Pure threshold comparison: optimized iff bandwidth <= threshold for the
/// key, falling back to the default table for entries the config lacks.
Impl select_impl(Routine routine, std::string_view variant, Precision precision,
                 index_t bandwidth, const DispatchConfig& config);

/// Reports what a dispatched call decided.
struct DispatchInfo {
    Impl impl_used = Impl::baseline;
    index_t bandwidth = 0;
    std::string key;
};

namespace detail {

template <typename T>
simd::LaneConfig for_precision(simd::LaneConfig cfg) {
    cfg.precision = precision_of_v<T>;
    return cfg;
}

inline std::string_view gbmv_variant(bool transposed) { return transposed ? "T" : "N"; }
inline std::string_view sbmv_variant(Side side) { return side == Side::lower ? "lower" : "upper"; }
inline std::string_view triangular_variant(Side side, bool transposed) {
    if (side == Side::lower) return transposed ? "LT" : "LN";
    return transposed ? "UT" : "UN";
}

}  // namespace detail

/// y = alpha * op(A) * x + beta * y; bandwidth kl+ku+1 picks the kernel.
template <typename T>
void gbmv(const GeneralBandMatrix<T>& a, bool transposed, T alpha, T beta, std::span<const T> x,
          std::span<T> y, const DispatchConfig& config = default_config(),
          DispatchInfo* info = nullptr) {
    const ref::GbmvArgs<T> args{&a, transposed, alpha, beta, x, y};
    ref::validate(args);
    const index_t bw = a.layout().kl + a.layout().ku + 1;
    const auto variant = detail::gbmv_variant(transposed);
    const Impl impl = select_impl(Routine::gbmv, variant, precision_of_v<T>, bw, config);
    const auto lanes_cfg = detail::for_precision<T>(config.mv_lanes);
    if (impl == Impl::optimized)
        opt::gbmv_opt<T, DefaultEngine>(args, lanes_cfg);
    else
        ref::gbmv_ref<T, DefaultEngine>(args, simd::max_lanes(lanes_cfg));
    if (info) *info = {impl, bw, threshold_key(Routine::gbmv, variant, precision_of_v<T>)};
}

/// y = alpha * A * x + beta * y for a symmetric band matrix; bandwidth k.
template <typename T>
void sbmv(const SymmetricBandMatrix<T>& a, T alpha, T beta, std::span<const T> x, std::span<T> y,
          const DispatchConfig& config = default_config(), DispatchInfo* info = nullptr) {
    ref::validate_sbmv(a, x, y);
    const index_t bw = a.k();
    const auto variant = detail::sbmv_variant(a.side());
    const Impl impl = select_impl(Routine::sbmv, variant, precision_of_v<T>, bw, config);
    const auto lanes_cfg = detail::for_precision<T>(config.mv_lanes);
    if (impl == Impl::optimized)
        opt::sbmv_opt<T, DefaultEngine>(a, alpha, beta, x, y, lanes_cfg);
    else
        ref::sbmv_ref<T, DefaultEngine>(a, alpha, beta, x, y, simd::max_lanes(lanes_cfg));
    if (info) *info = {impl, bw, threshold_key(Routine::sbmv, variant, precision_of_v<T>)};
}

/// x = op(A) * x for a triangular band matrix; bandwidth k.
template <typename T>
void tbmv(const TriangularBandMatrix<T>& a, std::span<T> x,
          const DispatchConfig& config = default_config(), DispatchInfo* info = nullptr) {
    ref::validate_inplace(a, std::span<const T>(x));
    const index_t bw = a.k();
    const auto variant = detail::triangular_variant(a.side(), a.transposed());
    const Impl impl = select_impl(Routine::tbmv, variant, precision_of_v<T>, bw, config);
    const auto lanes_cfg = detail::for_precision<T>(config.mv_lanes);
    if (impl == Impl::optimized)
        opt::tbmv_opt<T, DefaultEngine>(a, x, lanes_cfg);
    else
        ref::tbmv_ref<T, DefaultEngine>(a, x, simd::max_lanes(lanes_cfg));
    if (info) *info = {impl, bw, threshold_key(Routine::tbmv, variant, precision_of_v<T>)};
}

/// b = op(A)^-1 * b for a triangular band matrix; bandwidth k.  The solve
/// family's narrower lane grouping applies to both implementations.
template <typename T>
void tbsv(const TriangularBandMatrix<T>& a, std::span<T> b,
          const DispatchConfig& config = default_config(), DispatchInfo* info = nullptr) {
    ref::validate_inplace(a, std::span<const T>(b));
    const index_t bw = a.k();
    const auto variant = detail::triangular_variant(a.side(), a.transposed());
    const Impl impl = select_impl(Routine::tbsv, variant, precision_of_v<T>, bw, config);
    const auto lanes_cfg = detail::for_precision<T>(config.tbsv_lanes);
    if (impl == Impl::optimized)
        opt::tbsv_opt<T, DefaultEngine>(a, b, lanes_cfg);
    else
        ref::tbsv_ref<T, DefaultEngine>(a, b, simd::max_lanes(lanes_cfg));
    if (info) *info = {impl, bw, threshold_key(Routine::tbsv, variant, precision_of_v<T>)};
}

}  // namespace bandblas
