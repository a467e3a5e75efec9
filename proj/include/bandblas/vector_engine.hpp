#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "bandblas/types.hpp"

#if defined(__AVX512F__) || defined(__AVX2__) || defined(__SSE2__) || defined(__ARM_NEON) || \
    defined(__riscv_vector)
#define BANDBLAS_HAVE_NATIVE_SIMD 1
#else
#define BANDBLAS_HAVE_NATIVE_SIMD 0
#endif

namespace bandblas::simd {

/// Widest logical vector supported: 512-bit registers grouped by 8.
inline constexpr index_t kMaxLogicalBits = 4096;

constexpr index_t element_bits(Precision p) { return p == Precision::f32 ? 32 : 64; }

/// Lane-width configuration: a physical register width grouped into a wider
/// logical register, as on ISAs with register grouping.
struct LaneConfig {
    index_t register_bits = 128;
    index_t group_factor = 4;
    Precision precision = Precision::f64;

    void validate() const {
        if (register_bits < 32 || register_bits % 32 != 0)
            throw argument_error(1, "register_bits (=" + std::to_string(register_bits) +
                                        ") must be a positive multiple of 32");
        if (group_factor != 1 && group_factor != 2 && group_factor != 4 && group_factor != 8)
            throw argument_error(2, "group_factor (=" + std::to_string(group_factor) +
                                        ") must be 1, 2, 4, or 8");
        if (register_bits * group_factor > kMaxLogicalBits)
            throw argument_error(1, "logical width " +
                                        std::to_string(register_bits * group_factor) +
                                        " exceeds " + std::to_string(kMaxLogicalBits) + " bits");
        if (register_bits * group_factor < element_bits(precision))
            throw argument_error(1, "logical width " +
                                        std::to_string(register_bits * group_factor) +
                                        " bits holds no lane of " +
                                        std::to_string(element_bits(precision)) + "-bit elements");
    }
};

/// Lane count of the logical register for the configured element type.
inline index_t max_lanes(const LaneConfig& cfg) {
    cfg.validate();
    return cfg.register_bits * cfg.group_factor / element_bits(cfg.precision);
}

/// Lane count when the element type is fixed by a template parameter; the
/// config's precision field is overridden by T.
template <typename T>
index_t lanes_for(const LaneConfig& cfg) {
    return max_lanes(LaneConfig{cfg.register_bits, cfg.group_factor, precision_of_v<T>});
}

/// Fixed-capacity value container; the live region [0, vl) is tracked by the
/// caller, lanes at or beyond vl follow the tail-undisturbed contract.
template <typename T>
struct Vec {
    static constexpr index_t capacity = kMaxLogicalBits / static_cast<index_t>(8 * sizeof(T));
    std::array<T, static_cast<size_t>(capacity)> lane{};

    T& operator[](index_t i) { return lane[static_cast<size_t>(i)]; }
    const T& operator[](index_t i) const { return lane[static_cast<size_t>(i)]; }
};

namespace detail {

template <typename T>
inline void check_vl(index_t vl) {
    if (vl < 0 || vl > Vec<T>::capacity)
        throw bounds_error("effective length " + std::to_string(vl) + " outside [0, " +
                           std::to_string(Vec<T>::capacity) + "]");
}

inline void check_view(std::size_t need, std::size_t have, const char* what) {
    if (have < need)
        throw bounds_error(std::string(what) + ": view of " + std::to_string(have) +
                           " elements, need " + std::to_string(need));
}

}  // namespace detail

// Both backends implement the same contract:
//   - operations touch only lanes [0, vl)
//   - results of accumulator ops keep the accumulator's lanes at >= vl
//     (tail-undisturbed); accumulator-free ops zero those lanes
//   - fused multiply-add per lane, single rounding
//   - reduce_sum adds lanes strictly left to right
// The native backend annotates its elementwise loops for SIMD codegen and is
// meaningful only when the build targets a vector ISA; check
// native_available().

struct ScalarEngine {
    static constexpr const char* name() { return "scalar"; }

    template <typename T>
    static Vec<T> load_contiguous(std::span<const T> base, index_t vl) {
        detail::check_vl<T>(vl);
        detail::check_view(static_cast<std::size_t>(vl), base.size(), "load_contiguous");
        Vec<T> out;
        for (index_t i = 0; i < vl; ++i) out[i] = base[static_cast<std::size_t>(i)];
        return out;
    }

    template <typename T>
    static Vec<T> load_strided(std::span<const T> base, index_t stride, index_t vl) {
        detail::check_vl<T>(vl);
        if (stride < 0) throw bounds_error("load_strided: negative stride");
        if (vl > 0)
            detail::check_view(static_cast<std::size_t>((vl - 1) * stride + 1), base.size(),
                               "load_strided");
        Vec<T> out;
        for (index_t i = 0; i < vl; ++i) out[i] = base[static_cast<std::size_t>(i * stride)];
        return out;
    }

    template <typename T>
    static void store(std::span<T> base, const Vec<T>& v, index_t vl) {
        detail::check_vl<T>(vl);
        detail::check_view(static_cast<std::size_t>(vl), base.size(), "store");
        for (index_t i = 0; i < vl; ++i) base[static_cast<std::size_t>(i)] = v[i];
    }

    template <typename T>
    static Vec<T> broadcast(T s, index_t vl) {
        detail::check_vl<T>(vl);
        Vec<T> out;
        for (index_t i = 0; i < vl; ++i) out[i] = s;
        return out;
    }

    template <typename T>
    static Vec<T> fma_vv(const Vec<T>& a, const Vec<T>& b, Vec<T> acc, index_t vl) {
        detail::check_vl<T>(vl);
        for (index_t i = 0; i < vl; ++i) acc[i] = std::fma(a[i], b[i], acc[i]);
        return acc;
    }

    template <typename T>
    static Vec<T> fma_vf(T s, const Vec<T>& b, Vec<T> acc, index_t vl) {
        detail::check_vl<T>(vl);
        for (index_t i = 0; i < vl; ++i) acc[i] = std::fma(s, b[i], acc[i]);
        return acc;
    }

    template <typename T>
    static Vec<T> mul_vv(const Vec<T>& a, const Vec<T>& b, index_t vl) {
        detail::check_vl<T>(vl);
        Vec<T> out;
        for (index_t i = 0; i < vl; ++i) out[i] = a[i] * b[i];
        return out;
    }

    template <typename T>
    static Vec<T> mul_vf(T s, const Vec<T>& b, index_t vl) {
        detail::check_vl<T>(vl);
        Vec<T> out;
        for (index_t i = 0; i < vl; ++i) out[i] = s * b[i];
        return out;
    }

    template <typename T>
    static T reduce_sum(const Vec<T>& v, index_t vl) {
        detail::check_vl<T>(vl);
        T sum = T(0);
        for (index_t i = 0; i < vl; ++i) sum += v[i];
        return sum;
    }
};

struct NativeEngine {
    static constexpr const char* name() { return "native"; }

    template <typename T>
    static Vec<T> load_contiguous(std::span<const T> base, index_t vl) {
        detail::check_vl<T>(vl);
        detail::check_view(static_cast<std::size_t>(vl), base.size(), "load_contiguous");
        Vec<T> out;
        const T* src = base.data();
#pragma omp simd
        for (index_t i = 0; i < vl; ++i) out[i] = src[i];
        return out;
    }

    template <typename T>
    static Vec<T> load_strided(std::span<const T> base, index_t stride, index_t vl) {
        detail::check_vl<T>(vl);
        if (stride < 0) throw bounds_error("load_strided: negative stride");
        if (vl > 0)
            detail::check_view(static_cast<std::size_t>((vl - 1) * stride + 1), base.size(),
                               "load_strided");
        Vec<T> out;
        const T* src = base.data();
#pragma omp simd
        for (index_t i = 0; i < vl; ++i) out[i] = src[i * stride];
        return out;
    }

    template <typename T>
    static void store(std::span<T> base, const Vec<T>& v, index_t vl) {
        detail::check_vl<T>(vl);
        detail::check_view(static_cast<std::size_t>(vl), base.size(), "store");
        T* dst = base.data();
#pragma omp simd
        for (index_t i = 0; i < vl; ++i) dst[i] = v[i];
    }

    template <typename T>
    static Vec<T> broadcast(T s, index_t vl) {
        detail::check_vl<T>(vl);
        Vec<T> out;
#pragma omp simd
        for (index_t i = 0; i < vl; ++i) out[i] = s;
        return out;
    }

    template <typename T>
    static Vec<T> fma_vv(const Vec<T>& a, const Vec<T>& b, Vec<T> acc, index_t vl) {
        detail::check_vl<T>(vl);
#pragma omp simd
        for (index_t i = 0; i < vl; ++i) acc[i] = std::fma(a[i], b[i], acc[i]);
        return acc;
    }

    template <typename T>
    static Vec<T> fma_vf(T s, const Vec<T>& b, Vec<T> acc, index_t vl) {
        detail::check_vl<T>(vl);
#pragma omp simd
        for (index_t i = 0; i < vl; ++i) acc[i] = std::fma(s, b[i], acc[i]);
        return acc;
    }

    template <typename T>
    static Vec<T> mul_vv(const Vec<T>& a, const Vec<T>& b, index_t vl) {
        detail::check_vl<T>(vl);
        Vec<T> out;
#pragma omp simd
        for (index_t i = 0; i < vl; ++i) out[i] = a[i] * b[i];
        return out;
    }

    template <typename T>
    static Vec<T> mul_vf(T s, const Vec<T>& b, index_t vl) {
        detail::check_vl<T>(vl);
        Vec<T> out;
#pragma omp simd
        for (index_t i = 0; i < vl; ++i) out[i] = s * b[i];
        return out;
    }

    // Lane order is part of the contract, so the reduction stays sequential
    // in both backends.
    template <typename T>
    static T reduce_sum(const Vec<T>& v, index_t vl) {
        detail::check_vl<T>(vl);
        T sum = T(0);
        for (index_t i = 0; i < vl; ++i) sum += v[i];
        return sum;
    }
};

constexpr bool native_available() { return BANDBLAS_HAVE_NATIVE_SIMD != 0; }

}  // namespace bandblas::simd
