#pragma once

#include <algorithm>
#include <span>

#include "bandblas/band_matrix.hpp"
#include "bandblas/types.hpp"
#include "bandblas/vector_engine.hpp"

namespace bandblas::ref {

namespace detail {

template <typename T>
index_t resolve_lanes(index_t lanes) {
    return lanes > 0 ? lanes : simd::lanes_for<T>(simd::LaneConfig{});
}

/// y = beta * y; beta = 0 assigns without reading (overwrites NaN inputs).
template <typename T>
void scale_vector(T beta, std::span<T> y) {
    if (beta == T(1)) return;
    if (beta == T(0))
        std::fill(y.begin(), y.end(), T(0));
    else
        for (T& v : y) v *= beta;
}

}  // namespace detail

/// y += scalar * x on `length` elements, in effective-length trips.
template <typename T, typename Engine = simd::ScalarEngine>
void axpy(index_t length, T scalar, std::span<const T> x, std::span<T> y, index_t lanes = 0) {
    const index_t L = detail::resolve_lanes<T>(lanes);
    for (index_t i = 0; i < length;) {
        const index_t vl = std::min(L, length - i);
        auto xv = Engine::template load_contiguous<T>(x.subspan(static_cast<size_t>(i)), vl);
        auto yv = Engine::template load_contiguous<T>(
            std::span<const T>(y).subspan(static_cast<size_t>(i)), vl);
        yv = Engine::fma_vf(scalar, xv, yv, vl);
        Engine::store(y.subspan(static_cast<size_t>(i)), yv, vl);
        i += vl;
    }
}

/// Sum of x[t] * y[t] over `length` elements; empty length gives 0.  Partial
/// products accumulate lanewise, relying on tail-undisturbed partial trips,
/// with one reduction at the end.
template <typename T, typename Engine = simd::ScalarEngine>
T dot(index_t length, std::span<const T> x, std::span<const T> y, index_t lanes = 0) {
    if (length <= 0) return T(0);
    const index_t L = detail::resolve_lanes<T>(lanes);
    auto acc = Engine::template broadcast<T>(T(0), L);
    for (index_t i = 0; i < length;) {
        const index_t vl = std::min(L, length - i);
        auto xv = Engine::template load_contiguous<T>(x.subspan(static_cast<size_t>(i)), vl);
        auto yv = Engine::template load_contiguous<T>(y.subspan(static_cast<size_t>(i)), vl);
        acc = Engine::fma_vv(xv, yv, acc, vl);
        i += vl;
    }
    return Engine::reduce_sum(acc, L);
}

template <typename T>
struct GbmvArgs {
    const GeneralBandMatrix<T>* matrix = nullptr;
    bool transposed = false;
    T alpha = T(1);
    T beta = T(0);
    std::span<const T> x;
    std::span<T> y;  // in-out
};

template <typename T>
void validate(const GbmvArgs<T>& args) {
    if (!args.matrix) throw argument_error(1, "matrix is null");
    const BandLayout& L = args.matrix->layout();
    const index_t xn = args.transposed ? L.m : L.n;
    const index_t yn = args.transposed ? L.n : L.m;
    if (static_cast<index_t>(args.x.size()) != xn)
        throw argument_error(5, "x has " + std::to_string(args.x.size()) +
                                    " elements, op(A) needs " + std::to_string(xn));
    if (static_cast<index_t>(args.y.size()) != yn)
        throw argument_error(6, "y has " + std::to_string(args.y.size()) +
                                    " elements, op(A) needs " + std::to_string(yn));
}

namespace detail {

// Column sweep of the banded accumulation y += alpha * op(A) * x restricted
// to columns [c0, c1).  Per-column offsets follow the reference bookkeeping:
// for column c the stored slots [start, end) map to rows start - offset_u
// onward, with offset_u = ku - c and offset_l = ku + m - c.  Bounds stay
// valid for kl/ku exceeding the matrix dimensions.
template <typename T, typename Engine>
void gbmv_columns(const GeneralBandMatrix<T>& mat, bool transposed, T alpha,
                  std::span<const T> x, std::span<T> y, index_t c0, index_t c1, index_t lanes) {
    const BandLayout& L = mat.layout();
    const auto panel = mat.data();
    const index_t limit = std::min(L.n, L.m + L.ku);
    c1 = std::min(c1, limit);
    for (index_t c = std::max<index_t>(0, c0); c < c1; ++c) {
        const index_t offset_u = L.ku - c;
        const index_t offset_l = L.ku + L.m - c;
        const index_t start = std::max<index_t>(offset_u, 0);
        const index_t end = std::min(offset_l, L.ku + L.kl + 1);
        const index_t length = end - start;
        if (length <= 0) continue;
        const auto col = panel.subspan(static_cast<size_t>(c * L.lda + start),
                                       static_cast<size_t>(length));
        const index_t row0 = start - offset_u;
        if (!transposed) {
            axpy<T, Engine>(length, static_cast<T>(alpha * x[static_cast<size_t>(c)]), col,
                            y.subspan(static_cast<size_t>(row0)), lanes);
        } else {
            y[static_cast<size_t>(c)] +=
                alpha * dot<T, Engine>(length, col,
                                       x.subspan(static_cast<size_t>(row0)), lanes);
        }
    }
}

}  // namespace detail

/// y = alpha * op(A) * x + beta * y, column-wise: axpy per column when not
/// transposed, dot per column when transposed.
template <typename T, typename Engine = simd::ScalarEngine>
void gbmv_ref(const GbmvArgs<T>& args, index_t lanes = 0) {
    validate(args);
    const index_t L = detail::resolve_lanes<T>(lanes);
    detail::scale_vector(args.beta, args.y);
    if (args.alpha == T(0)) return;
    detail::gbmv_columns<T, Engine>(*args.matrix, args.transposed, args.alpha, args.x, args.y, 0,
                                    args.matrix->layout().n, L);
}

template <typename T>
void validate_sbmv(const SymmetricBandMatrix<T>& mat, std::span<const T> x, std::span<T> y) {
    if (static_cast<index_t>(x.size()) != mat.dim())
        throw argument_error(4, "x has " + std::to_string(x.size()) + " elements, need " +
                                    std::to_string(mat.dim()));
    if (static_cast<index_t>(y.size()) != mat.dim())
        throw argument_error(5, "y has " + std::to_string(y.size()) + " elements, need " +
                                    std::to_string(mat.dim()));
}

/// y = alpha * A * x + beta * y for a symmetric band matrix: per column, an
/// axpy over the stored triangle plus a dot over the mirrored row part.
template <typename T, typename Engine = simd::ScalarEngine>
void sbmv_ref(const SymmetricBandMatrix<T>& mat, T alpha, T beta, std::span<const T> x,
              std::span<T> y, index_t lanes = 0) {
    validate_sbmv(mat, x, y);
    const index_t L = detail::resolve_lanes<T>(lanes);
    detail::scale_vector(beta, y);
    if (alpha == T(0)) return;
    const index_t n = mat.dim();
    const index_t k = mat.k();
    const index_t lda = mat.layout().lda;
    const auto panel = mat.data();
    for (index_t j = 0; j < n; ++j) {
        if (mat.side() == Side::lower) {
            const index_t len = std::min(k, n - 1 - j) + 1;  // diagonal + subdiagonals
            const auto col = panel.subspan(static_cast<size_t>(j * lda),
                                           static_cast<size_t>(len));
            axpy<T, Engine>(len, static_cast<T>(alpha * x[static_cast<size_t>(j)]), col,
                            y.subspan(static_cast<size_t>(j)), L);
            if (len > 1)
                y[static_cast<size_t>(j)] +=
                    alpha * dot<T, Engine>(len - 1, col.subspan(1),
                                           x.subspan(static_cast<size_t>(j + 1)), L);
        } else {
            const index_t lo = std::max<index_t>(0, j - k);
            const index_t len = j - lo + 1;  // superdiagonals + diagonal
            const auto col = panel.subspan(static_cast<size_t>(j * lda + k - (len - 1)),
                                           static_cast<size_t>(len));
            axpy<T, Engine>(len, static_cast<T>(alpha * x[static_cast<size_t>(j)]), col,
                            y.subspan(static_cast<size_t>(lo)), L);
            if (len > 1)
                y[static_cast<size_t>(j)] +=
                    alpha * dot<T, Engine>(len - 1, col.first(static_cast<size_t>(len - 1)),
                                           x.subspan(static_cast<size_t>(lo)), L);
        }
    }
}

template <typename T>
void validate_inplace(const TriangularBandMatrix<T>& mat, std::span<const T> x) {
    if (static_cast<index_t>(x.size()) != mat.dim())
        throw argument_error(2, "vector has " + std::to_string(x.size()) + " elements, need " +
                                    std::to_string(mat.dim()));
}

/// x = op(A) * x in place.  Non-transposed variants sweep columns with axpy
/// (lower descending, upper ascending); transposed variants compute each
/// element with a dot over the stored column (lower ascending, upper
/// descending).  The orders guarantee no element is read after overwrite.
template <typename T, typename Engine = simd::ScalarEngine>
void tbmv_ref(const TriangularBandMatrix<T>& mat, std::span<T> x, index_t lanes = 0) {
    validate_inplace(mat, std::span<const T>(x));
    const index_t L = detail::resolve_lanes<T>(lanes);
    const index_t n = mat.dim();
    const index_t k = mat.k();
    const index_t lda = mat.layout().lda;
    const bool unit = mat.unit_diagonal();
    const auto panel = mat.data();
    const auto lower_col = [&](index_t j, index_t len) {
        return panel.subspan(static_cast<size_t>(j * lda), static_cast<size_t>(len));
    };
    if (mat.side() == Side::lower) {
        if (!mat.transposed()) {
            for (index_t j = n - 1; j >= 0; --j) {
                const T t = x[static_cast<size_t>(j)];
                x[static_cast<size_t>(j)] = unit ? t : static_cast<T>(panel[static_cast<size_t>(j * lda)] * t);
                const index_t len = std::min(k, n - 1 - j);
                if (len > 0)
                    axpy<T, Engine>(len, t, lower_col(j, len + 1).subspan(1),
                                    x.subspan(static_cast<size_t>(j + 1)), L);
            }
        } else {
            for (index_t i = 0; i < n; ++i) {
                const index_t len = std::min(k, n - 1 - i);
                const T d = unit ? x[static_cast<size_t>(i)]
                                 : static_cast<T>(panel[static_cast<size_t>(i * lda)] *
                                                  x[static_cast<size_t>(i)]);
                T s = d;
                if (len > 0)
                    s += dot<T, Engine>(len, lower_col(i, len + 1).subspan(1),
                                        x.subspan(static_cast<size_t>(i + 1)), L);
                x[static_cast<size_t>(i)] = s;
            }
        }
    } else {
        const auto upper_col = [&](index_t j, index_t len) {
            // len entries ending at the diagonal slot k
            return panel.subspan(static_cast<size_t>(j * lda + k + 1 - len),
                                 static_cast<size_t>(len));
        };
        if (!mat.transposed()) {
            for (index_t j = 0; j < n; ++j) {
                const T t = x[static_cast<size_t>(j)];
                x[static_cast<size_t>(j)] =
                    unit ? t : static_cast<T>(panel[static_cast<size_t>(j * lda + k)] * t);
                const index_t len = std::min(k, j);
                if (len > 0)
                    axpy<T, Engine>(len, t, upper_col(j, len + 1).first(static_cast<size_t>(len)),
                                    x.subspan(static_cast<size_t>(j - len)), L);
            }
        } else {
            for (index_t i = n - 1; i >= 0; --i) {
                const index_t len = std::min(k, i);
                const T d = unit ? x[static_cast<size_t>(i)]
                                 : static_cast<T>(panel[static_cast<size_t>(i * lda + k)] *
                                                  x[static_cast<size_t>(i)]);
                T s = d;
                if (len > 0)
                    s += dot<T, Engine>(len, upper_col(i, len + 1).first(static_cast<size_t>(len)),
                                        x.subspan(static_cast<size_t>(i - len)), L);
                x[static_cast<size_t>(i)] = s;
            }
        }
    }
}

/// b = op(A)^-1 * b in place by substitution: axpy-style elimination for the
/// non-transposed variants, dot-style gathering for the transposed ones.  A
/// zero diagonal propagates infinities rather than raising.
template <typename T, typename Engine = simd::ScalarEngine>
void tbsv_ref(const TriangularBandMatrix<T>& mat, std::span<T> b, index_t lanes = 0) {
    validate_inplace(mat, std::span<const T>(b));
    const index_t L = detail::resolve_lanes<T>(lanes);
    const index_t n = mat.dim();
    const index_t k = mat.k();
    const index_t lda = mat.layout().lda;
    const bool unit = mat.unit_diagonal();
    const auto panel = mat.data();
    if (mat.side() == Side::lower) {
        if (!mat.transposed()) {
            // forward: x_i = (b_i - sum_{j<i} A(i,j) x_j) / A(i,i)
            for (index_t i = 0; i < n; ++i) {
                if (!unit) b[static_cast<size_t>(i)] /= panel[static_cast<size_t>(i * lda)];
                const index_t len = std::min(n - i - 1, k);
                if (len > 0)
                    axpy<T, Engine>(len, static_cast<T>(-b[static_cast<size_t>(i)]),
                                    panel.subspan(static_cast<size_t>(i * lda + 1),
                                                  static_cast<size_t>(len)),
                                    b.subspan(static_cast<size_t>(i + 1)), L);
            }
        } else {
            // op upper: backward, gathering the stored column below i
            for (index_t i = n - 1; i >= 0; --i) {
                const index_t len = std::min(n - i - 1, k);
                if (len > 0)
                    b[static_cast<size_t>(i)] -=
                        dot<T, Engine>(len,
                                       panel.subspan(static_cast<size_t>(i * lda + 1),
                                                     static_cast<size_t>(len)),
                                       std::span<const T>(b).subspan(static_cast<size_t>(i + 1)),
                                       L);
                if (!unit) b[static_cast<size_t>(i)] /= panel[static_cast<size_t>(i * lda)];
            }
        }
    } else {
        if (!mat.transposed()) {
            // backward: x_i = (b_i - sum_{j>i} A(i,j) x_j) / A(i,i)
            for (index_t i = n - 1; i >= 0; --i) {
                if (!unit) b[static_cast<size_t>(i)] /= panel[static_cast<size_t>(i * lda + k)];
                const index_t len = std::min(i, k);
                if (len > 0)
                    axpy<T, Engine>(len, static_cast<T>(-b[static_cast<size_t>(i)]),
                                    panel.subspan(static_cast<size_t>(i * lda + k - len),
                                                  static_cast<size_t>(len)),
                                    b.subspan(static_cast<size_t>(i - len)), L);
            }
        } else {
            // op lower: forward, gathering the stored column above i
            for (index_t i = 0; i < n; ++i) {
                const index_t len = std::min(i, k);
                if (len > 0)
                    b[static_cast<size_t>(i)] -=
                        dot<T, Engine>(len,
                                       panel.subspan(static_cast<size_t>(i * lda + k - len),
                                                     static_cast<size_t>(len)),
                                       std::span<const T>(b).subspan(static_cast<size_t>(i - len)),
                                       L);
                if (!unit) b[static_cast<size_t>(i)] /= panel[static_cast<size_t>(i * lda + k)];
            }
        }
    }
}

}  // namespace bandblas::ref
