#pragma once

#include <algorithm>
#include <span>

#include "bandblas/band_matrix.hpp"
#include "bandblas/kernels_baseline.hpp"
#include "bandblas/types.hpp"
#include "bandblas/vector_engine.hpp"

namespace bandblas::opt {

/// Column split for the diagonally-blocked traversal: [start, end) is the
/// middle region of full-height columns, a multiple of `block` wide; the
/// prologue [0, start) and epilogue [end, columns) fall back to the baseline.
struct BlockPlan {
    index_t block = 1;
    index_t columns = 0;
    index_t start = 0;
    index_t end = 0;

    bool empty() const { return end <= start; }
    index_t trips() const { return empty() ? 0 : (end - start) / block; }
};

/// Clamps [first_full, last_full) into [0, columns) and aligns its width down
/// to a multiple of block; align_high keeps the top edge instead (for kernels
/// that traverse descending).
inline BlockPlan make_block_plan(index_t columns, index_t first_full, index_t last_full,
                                 index_t block, bool align_high = false) {
    BlockPlan p;
    p.block = std::max<index_t>(block, 1);
    p.columns = columns;
    p.start = std::clamp<index_t>(first_full, 0, columns);
    p.end = std::clamp<index_t>(last_full, p.start, columns);
    const index_t rem = (p.end - p.start) % p.block;
    if (align_high)
        p.start += rem;
    else
        p.end -= rem;
    return p;
}

namespace detail {

constexpr size_t zu(index_t v) { return static_cast<size_t>(v); }

}  // namespace detail

/// Diagonally-blocked y = alpha * op(A) * x + beta * y.  The middle region is
/// walked in blocks of `lanes` columns; within a block every stored diagonal
/// is loaded with stride lda and folded into the x/y window shifted by the
/// diagonal's row offset.  Prologue and epilogue columns run the baseline
/// column sweep, so an empty middle reproduces it exactly.
template <typename T, typename Engine = simd::ScalarEngine>
void gbmv_opt(const ref::GbmvArgs<T>& args, const simd::LaneConfig& config) {
    using detail::zu;
    ref::validate(args);
    const index_t B = simd::lanes_for<T>(config);
    const BandLayout& L = args.matrix->layout();
    ref::detail::scale_vector(args.beta, args.y);
    if (args.alpha == T(0)) return;
    const BlockPlan plan = make_block_plan(L.n, L.ku, std::min(L.n, L.m - L.kl), B);
    ref::detail::gbmv_columns<T, Engine>(*args.matrix, args.transposed, args.alpha, args.x,
                                         args.y, 0, plan.start, B);
    const auto panel = args.matrix->data();
    const std::span<const T> y_in(args.y);
    const index_t diagonals = L.kl + L.ku + 1;
    for (index_t i = plan.start; i < plan.end; i += B) {
        const auto diag_base = panel.subspan(zu(i * L.lda));
        if (!args.transposed) {
            auto xv = Engine::template load_contiguous<T>(args.x.subspan(zu(i)), B);
            xv = Engine::mul_vf(args.alpha, xv, B);
            for (index_t j = 0; j < diagonals; ++j) {
                const index_t row0 = i + j - L.ku;
                auto yv = Engine::template load_contiguous<T>(y_in.subspan(zu(row0)), B);
                auto dv = Engine::template load_strided<T>(diag_base.subspan(zu(j)), L.lda, B);
                yv = Engine::fma_vv(dv, xv, yv, B);
                Engine::store(args.y.subspan(zu(row0)), yv, B);
            }
        } else {
            auto acc = Engine::template broadcast<T>(T(0), B);
            for (index_t j = 0; j < diagonals; ++j) {
                const index_t row0 = i + j - L.ku;
                auto xv = Engine::template load_contiguous<T>(args.x.subspan(zu(row0)), B);
                auto dv = Engine::template load_strided<T>(diag_base.subspan(zu(j)), L.lda, B);
                acc = Engine::fma_vv(dv, xv, acc, B);
            }
            auto yv = Engine::template load_contiguous<T>(y_in.subspan(zu(i)), B);
            yv = Engine::fma_vf(args.alpha, acc, yv, B);
            Engine::store(args.y.subspan(zu(i)), yv, B);
        }
    }
    ref::detail::gbmv_columns<T, Engine>(*args.matrix, args.transposed, args.alpha, args.x,
                                         args.y, plan.end, L.n, B);
}

/// y = alpha * A * x + beta * y with the axpy pass over all full columns
/// first, then the mirrored-row dot contributions folded per diagonal across
/// blocks of columns; residual full columns use the scalar dot and the
/// partial columns run the baseline interleaved form.
template <typename T, typename Engine = simd::ScalarEngine>
void sbmv_opt(const SymmetricBandMatrix<T>& mat, T alpha, T beta, std::span<const T> x,
              std::span<T> y, const simd::LaneConfig& config) {
    using detail::zu;
    ref::validate_sbmv(mat, x, y);
    const index_t B = simd::lanes_for<T>(config);
    const index_t n = mat.dim();
    const index_t k = mat.k();
    const BlockPlan probe = mat.side() == Side::lower
                                ? make_block_plan(n, 0, n - k, B)
                                : make_block_plan(n, std::min(k, n), n, B);
    if (probe.empty()) {
        // no full block fits: the split-phase update order would still differ
        // from the column-interleaved baseline, so run the baseline outright
        ref::sbmv_ref<T, Engine>(mat, alpha, beta, x, y, B);
        return;
    }
    ref::detail::scale_vector(beta, y);
    if (alpha == T(0)) return;
    const index_t lda = mat.layout().lda;
    const auto panel = mat.data();
    const std::span<const T> y_in(y);
    const auto baseline_column = [&](index_t i) {
        if (mat.side() == Side::lower) {
            const index_t len = std::min(k, n - 1 - i) + 1;
            ref::axpy<T, Engine>(len, static_cast<T>(alpha * x[zu(i)]),
                                 panel.subspan(zu(i * lda), zu(len)), y.subspan(zu(i)), B);
            if (len > 1)
                y[zu(i)] += alpha * ref::dot<T, Engine>(len - 1,
                                                        panel.subspan(zu(i * lda + 1), zu(len - 1)),
                                                        x.subspan(zu(i + 1)), B);
        } else {
            const index_t lo = std::max<index_t>(0, i - k);
            const index_t len = i - lo + 1;
            const auto col = panel.subspan(zu(i * lda + k - (len - 1)), zu(len));
            ref::axpy<T, Engine>(len, static_cast<T>(alpha * x[zu(i)]), col, y.subspan(zu(lo)), B);
            if (len > 1)
                y[zu(i)] += alpha * ref::dot<T, Engine>(len - 1, col.first(zu(len - 1)),
                                                        x.subspan(zu(lo)), B);
        }
    };
    if (mat.side() == Side::lower) {
        const BlockPlan plan = make_block_plan(n, 0, n - k, B);
        const index_t full_end = std::max<index_t>(n - k, 0);
        for (index_t i = 0; i < full_end; ++i)
            ref::axpy<T, Engine>(k + 1, static_cast<T>(alpha * x[zu(i)]),
                                 panel.subspan(zu(i * lda), zu(k + 1)), y.subspan(zu(i)), B);
        if (k > 0) {
            for (index_t i = plan.start; i < plan.end; i += B) {
                auto yv = Engine::template load_contiguous<T>(y_in.subspan(zu(i)), B);
                const auto diag_base = panel.subspan(zu(i * lda));
                for (index_t j = 0; j < k; ++j) {
                    auto xv = Engine::template load_contiguous<T>(x.subspan(zu(i + 1 + j)), B);
                    auto dv =
                        Engine::template load_strided<T>(diag_base.subspan(zu(1 + j)), lda, B);
                    auto mv = Engine::mul_vv(xv, dv, B);
                    yv = Engine::fma_vf(alpha, mv, yv, B);
                }
                Engine::store(y.subspan(zu(i)), yv, B);
            }
            for (index_t i = plan.end; i < full_end; ++i)
                y[zu(i)] += alpha * ref::dot<T, Engine>(k, panel.subspan(zu(i * lda + 1), zu(k)),
                                                        x.subspan(zu(i + 1)), B);
        }
        for (index_t i = full_end; i < n; ++i) baseline_column(i);
    } else {
        const index_t full_start = std::min(k, n);
        const BlockPlan plan = make_block_plan(n, full_start, n, B);
        for (index_t i = 0; i < full_start; ++i) baseline_column(i);
        for (index_t i = full_start; i < n; ++i)
            ref::axpy<T, Engine>(k + 1, static_cast<T>(alpha * x[zu(i)]),
                                 panel.subspan(zu(i * lda), zu(k + 1)), y.subspan(zu(i - k)), B);
        if (k > 0) {
            for (index_t i = plan.start; i < plan.end; i += B) {
                auto yv = Engine::template load_contiguous<T>(y_in.subspan(zu(i)), B);
                const auto diag_base = panel.subspan(zu(i * lda));
                for (index_t j = 0; j < k; ++j) {
                    auto xv = Engine::template load_contiguous<T>(x.subspan(zu(i - k + j)), B);
                    auto dv = Engine::template load_strided<T>(diag_base.subspan(zu(j)), lda, B);
                    auto mv = Engine::mul_vv(xv, dv, B);
                    yv = Engine::fma_vf(alpha, mv, yv, B);
                }
                Engine::store(y.subspan(zu(i)), yv, B);
            }
            for (index_t i = plan.end; i < n; ++i)
                y[zu(i)] += alpha * ref::dot<T, Engine>(k, panel.subspan(zu(i * lda), zu(k)),
                                                        x.subspan(zu(i - k)), B);
        }
    }
}

/// x = op(A) * x in place, blocked along diagonals.  Non-transposed variants
/// load the block's original x once, scale the diagonal lanes, then fan the
/// off-diagonal products out into shifted segments; transposed variants
/// accumulate into a single register and store once.  Traversal directions
/// match the baseline so no element is read after its final write.
template <typename T, typename Engine = simd::ScalarEngine>
void tbmv_opt(const TriangularBandMatrix<T>& mat, std::span<T> x, const simd::LaneConfig& config) {
    using detail::zu;
    ref::validate_inplace(mat, std::span<const T>(x));
    const index_t B = simd::lanes_for<T>(config);
    const index_t n = mat.dim();
    const index_t k = mat.k();
    const index_t lda = mat.layout().lda;
    const bool unit = mat.unit_diagonal();
    const auto panel = mat.data();
    const std::span<const T> x_in(x);
    const auto lower_baseline_axpy = [&](index_t j) {
        const T t = x[zu(j)];
        x[zu(j)] = unit ? t : static_cast<T>(panel[zu(j * lda)] * t);
        const index_t len = std::min(k, n - 1 - j);
        if (len > 0)
            ref::axpy<T, Engine>(len, t, panel.subspan(zu(j * lda + 1), zu(len)),
                                 x.subspan(zu(j + 1)), B);
    };
    const auto lower_baseline_dot = [&](index_t i) {
        const index_t len = std::min(k, n - 1 - i);
        T s = unit ? x[zu(i)] : static_cast<T>(panel[zu(i * lda)] * x[zu(i)]);
        if (len > 0)
            s += ref::dot<T, Engine>(len, panel.subspan(zu(i * lda + 1), zu(len)),
                                     x_in.subspan(zu(i + 1)), B);
        x[zu(i)] = s;
    };
    const auto upper_baseline_axpy = [&](index_t j) {
        const T t = x[zu(j)];
        x[zu(j)] = unit ? t : static_cast<T>(panel[zu(j * lda + k)] * t);
        const index_t len = std::min(k, j);
        if (len > 0)
            ref::axpy<T, Engine>(len, t, panel.subspan(zu(j * lda + k - len), zu(len)),
                                 x.subspan(zu(j - len)), B);
    };
    const auto upper_baseline_dot = [&](index_t i) {
        const index_t len = std::min(k, i);
        T s = unit ? x[zu(i)] : static_cast<T>(panel[zu(i * lda + k)] * x[zu(i)]);
        if (len > 0)
            s += ref::dot<T, Engine>(len, panel.subspan(zu(i * lda + k - len), zu(len)),
                                     x_in.subspan(zu(i - len)), B);
        x[zu(i)] = s;
    };
    if (mat.side() == Side::lower && !mat.transposed()) {
        const BlockPlan plan = make_block_plan(n, 0, n - k, B);
        for (index_t i = n - 1; i >= plan.end; --i) lower_baseline_axpy(i);
        for (index_t i = plan.end - B; i >= 0; i -= B) {
            const auto diag_base = panel.subspan(zu(i * lda));
            auto b_old = Engine::template load_contiguous<T>(x_in.subspan(zu(i)), B);
            if (!unit) {
                auto dv = Engine::template load_strided<T>(diag_base, lda, B);
                Engine::store(x.subspan(zu(i)), Engine::mul_vv(b_old, dv, B), B);
            }
            for (index_t j = 1; j <= k; ++j) {
                auto dv = Engine::template load_strided<T>(diag_base.subspan(zu(j)), lda, B);
                auto zv = Engine::template load_contiguous<T>(x_in.subspan(zu(i + j)), B);
                zv = Engine::fma_vv(dv, b_old, zv, B);
                Engine::store(x.subspan(zu(i + j)), zv, B);
            }
        }
    } else if (mat.side() == Side::lower) {  // transposed
        const BlockPlan plan = make_block_plan(n, 0, n - k, B);
        for (index_t i = 0; i < plan.end; i += B) {
            const auto diag_base = panel.subspan(zu(i * lda));
            auto b_old = Engine::template load_contiguous<T>(x_in.subspan(zu(i)), B);
            auto acc = b_old;
            if (!unit) {
                auto dv = Engine::template load_strided<T>(diag_base, lda, B);
                acc = Engine::mul_vv(b_old, dv, B);
            }
            for (index_t j = 1; j <= k; ++j) {
                auto dv = Engine::template load_strided<T>(diag_base.subspan(zu(j)), lda, B);
                auto zv = Engine::template load_contiguous<T>(x_in.subspan(zu(i + j)), B);
                acc = Engine::fma_vv(dv, zv, acc, B);
            }
            Engine::store(x.subspan(zu(i)), acc, B);
        }
        for (index_t i = plan.end; i < n; ++i) lower_baseline_dot(i);
    } else if (!mat.transposed()) {  // upper
        const BlockPlan plan = make_block_plan(n, std::min(k, n), n, B);
        for (index_t i = 0; i < plan.start; ++i) upper_baseline_axpy(i);
        for (index_t i = plan.start; i < plan.end; i += B) {
            const auto diag_base = panel.subspan(zu(i * lda));
            auto b_old = Engine::template load_contiguous<T>(x_in.subspan(zu(i)), B);
            if (!unit) {
                auto dv = Engine::template load_strided<T>(diag_base.subspan(zu(k)), lda, B);
                Engine::store(x.subspan(zu(i)), Engine::mul_vv(b_old, dv, B), B);
            }
            for (index_t j = 1; j <= k; ++j) {
                auto dv = Engine::template load_strided<T>(diag_base.subspan(zu(k - j)), lda, B);
                auto zv = Engine::template load_contiguous<T>(x_in.subspan(zu(i - j)), B);
                zv = Engine::fma_vv(dv, b_old, zv, B);
                Engine::store(x.subspan(zu(i - j)), zv, B);
            }
        }
        for (index_t i = plan.end; i < n; ++i) upper_baseline_axpy(i);
    } else {  // upper transposed
        const BlockPlan plan = make_block_plan(n, std::min(k, n), n, B, /*align_high=*/true);
        for (index_t i = n - B; i >= plan.start; i -= B) {
            const auto diag_base = panel.subspan(zu(i * lda));
            auto b_old = Engine::template load_contiguous<T>(x_in.subspan(zu(i)), B);
            auto acc = b_old;
            if (!unit) {
                auto dv = Engine::template load_strided<T>(diag_base.subspan(zu(k)), lda, B);
                acc = Engine::mul_vv(b_old, dv, B);
            }
            for (index_t j = 1; j <= k; ++j) {
                auto dv = Engine::template load_strided<T>(diag_base.subspan(zu(k - j)), lda, B);
                auto zv = Engine::template load_contiguous<T>(x_in.subspan(zu(i - j)), B);
                acc = Engine::fma_vv(dv, zv, acc, B);
            }
            Engine::store(x.subspan(zu(i)), acc, B);
        }
        for (index_t i = plan.start - 1; i >= 0; --i) upper_baseline_dot(i);
    }
}

/// b = op(A)^-1 * b in place.  The substitution recurrence is the baseline's;
/// the per-column dot/axpy runs in fixed chunks of this config's lane count
/// (the narrower solve-specific grouping), with the partial first/last k
/// columns handled by the baseline formulas.
template <typename T, typename Engine = simd::ScalarEngine>
void tbsv_opt(const TriangularBandMatrix<T>& mat, std::span<T> b, const simd::LaneConfig& config) {
    using detail::zu;
    ref::validate_inplace(mat, std::span<const T>(b));
    const index_t B = simd::lanes_for<T>(config);
    const index_t n = mat.dim();
    const index_t k = mat.k();
    const index_t lda = mat.layout().lda;
    const bool unit = mat.unit_diagonal();
    const auto panel = mat.data();
    const std::span<const T> b_in(b);
    if (mat.side() == Side::lower && !mat.transposed()) {
        const index_t full_end = std::max<index_t>(n - k, 0);
        for (index_t i = 0; i < full_end; ++i) {
            if (!unit) b[zu(i)] /= panel[zu(i * lda)];
            if (k > 0)
                ref::axpy<T, Engine>(k, static_cast<T>(-b[zu(i)]),
                                     panel.subspan(zu(i * lda + 1), zu(k)), b.subspan(zu(i + 1)),
                                     B);
        }
        for (index_t i = full_end; i < n; ++i) {
            if (!unit) b[zu(i)] /= panel[zu(i * lda)];
            const index_t len = std::min(n - i - 1, k);
            if (len > 0)
                ref::axpy<T, Engine>(len, static_cast<T>(-b[zu(i)]),
                                     panel.subspan(zu(i * lda + 1), zu(len)),
                                     b.subspan(zu(i + 1)), B);
        }
    } else if (mat.side() == Side::lower) {  // transposed: op is upper, backward
        const index_t full_end = std::max<index_t>(n - k, 0);
        for (index_t i = n - 1; i >= full_end; --i) {
            const index_t len = std::min(n - i - 1, k);
            if (len > 0)
                b[zu(i)] -= ref::dot<T, Engine>(len, panel.subspan(zu(i * lda + 1), zu(len)),
                                                b_in.subspan(zu(i + 1)), B);
            if (!unit) b[zu(i)] /= panel[zu(i * lda)];
        }
        for (index_t i = full_end - 1; i >= 0; --i) {
            b[zu(i)] -= ref::dot<T, Engine>(k, panel.subspan(zu(i * lda + 1), zu(k)),
                                            b_in.subspan(zu(i + 1)), B);
            if (!unit) b[zu(i)] /= panel[zu(i * lda)];
        }
    } else if (!mat.transposed()) {  // upper, backward
        const index_t full_start = std::min(k, n);
        for (index_t i = n - 1; i >= full_start; --i) {
            if (!unit) b[zu(i)] /= panel[zu(i * lda + k)];
            if (k > 0)
                ref::axpy<T, Engine>(k, static_cast<T>(-b[zu(i)]),
                                     panel.subspan(zu(i * lda), zu(k)), b.subspan(zu(i - k)), B);
        }
        for (index_t i = full_start - 1; i >= 0; --i) {
            if (!unit) b[zu(i)] /= panel[zu(i * lda + k)];
            const index_t len = std::min(i, k);
            if (len > 0)
                ref::axpy<T, Engine>(len, static_cast<T>(-b[zu(i)]),
                                     panel.subspan(zu(i * lda + k - len), zu(len)),
                                     b.subspan(zu(i - len)), B);
        }
    } else {  // upper transposed: op is lower, forward
        const index_t full_start = std::min(k, n);
        for (index_t i = 0; i < full_start; ++i) {
            const index_t len = std::min(i, k);
            if (len > 0)
                b[zu(i)] -= ref::dot<T, Engine>(len,
                                                panel.subspan(zu(i * lda + k - len), zu(len)),
                                                b_in.subspan(zu(i - len)), B);
            if (!unit) b[zu(i)] /= panel[zu(i * lda + k)];
        }
        for (index_t i = full_start; i < n; ++i) {
            b[zu(i)] -= ref::dot<T, Engine>(k, panel.subspan(zu(i * lda), zu(k)),
                                            b_in.subspan(zu(i - k)), B);
            if (!unit) b[zu(i)] /= panel[zu(i * lda + k)];
        }
    }
}

}  // namespace bandblas::opt
