#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "bandblas/band_matrix.hpp"
#include "bandblas/types.hpp"

namespace bandblas::oracle {

/// Accumulator one precision level wider than the working type, so the
/// reference is strictly more accurate than either kernel backend.
template <typename T>
using accum_t = std::conditional_t<std::is_same_v<T, float>, double, long double>;

class singular_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// ---------------------------------------------------------------------------
// Dense brute-force references.  These touch only DenseMatrix values, never
// band storage, so they stay independent of every kernel code path.
// ---------------------------------------------------------------------------

/// y = alpha * op(A) * x + beta * y; beta = 0 overwrites y without reading it.
template <typename T>
void dense_gemv(const DenseMatrix<T>& a, bool transposed, T alpha, T beta, std::span<const T> x,
                std::span<T> y) {
    const index_t rows = transposed ? a.cols() : a.rows();
    const index_t cols = transposed ? a.rows() : a.cols();
    if (static_cast<index_t>(x.size()) < cols)
        throw argument_error(5, "x has " + std::to_string(x.size()) + " elements, need " +
                                    std::to_string(cols));
    if (static_cast<index_t>(y.size()) < rows)
        throw argument_error(6, "y has " + std::to_string(y.size()) + " elements, need " +
                                    std::to_string(rows));
    using A = accum_t<T>;
    for (index_t i = 0; i < rows; ++i) {
        A acc = 0;
        for (index_t j = 0; j < cols; ++j) {
            const T aij = transposed ? a.at(j, i) : a.at(i, j);
            acc += static_cast<A>(aij) * static_cast<A>(x[static_cast<size_t>(j)]);
        }
        A out = static_cast<A>(alpha) * acc;
        if (beta != T(0)) out += static_cast<A>(beta) * static_cast<A>(y[static_cast<size_t>(i)]);
        y[static_cast<size_t>(i)] = static_cast<T>(out);
    }
}

/// x = op(A) * x for a square matrix (triangular callers pass the expanded
/// triangle, zeros elsewhere).
template <typename T>
void dense_trmv(const DenseMatrix<T>& a, bool transposed, std::span<T> x) {
    if (a.rows() != a.cols()) throw argument_error(1, "matrix must be square");
    std::vector<T> b(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(a.rows()));
    dense_gemv(a, transposed, T(1), T(0), std::span<const T>(b), x);
}

/// Solves op(A) * x = b in place by sequential substitution; `side` is the
/// stored triangle of A (op flips it when transposed).  Zero diagonal refuses
/// with singular_error.
template <typename T>
void dense_trsv(const DenseMatrix<T>& a, bool transposed, Side side, std::span<T> x) {
    if (a.rows() != a.cols()) throw argument_error(1, "matrix must be square");
    const index_t n = a.rows();
    if (static_cast<index_t>(x.size()) < n)
        throw argument_error(4, "x has " + std::to_string(x.size()) + " elements, need " +
                                    std::to_string(n));
    using A = accum_t<T>;
    const Side op_side = transposed ? (side == Side::lower ? Side::upper : Side::lower) : side;
    const auto op_at = [&](index_t i, index_t j) -> A {
        return static_cast<A>(transposed ? a.at(j, i) : a.at(i, j));
    };
    std::vector<A> z(static_cast<size_t>(n));
    const bool forward = op_side == Side::lower;
    for (index_t t = 0; t < n; ++t) {
        const index_t i = forward ? t : n - 1 - t;
        A acc = static_cast<A>(x[static_cast<size_t>(i)]);
        if (forward) {
            for (index_t j = 0; j < i; ++j) acc -= op_at(i, j) * z[static_cast<size_t>(j)];
        } else {
            for (index_t j = i + 1; j < n; ++j) acc -= op_at(i, j) * z[static_cast<size_t>(j)];
        }
        const A d = op_at(i, i);
        if (d == A(0))
            throw singular_error("zero diagonal at row " + std::to_string(i));
        z[static_cast<size_t>(i)] = acc / d;
    }
    for (index_t i = 0; i < n; ++i) x[static_cast<size_t>(i)] = static_cast<T>(z[static_cast<size_t>(i)]);
}

/// y = alpha * A * x + beta * y on an already-expanded symmetric matrix.
template <typename T>
void dense_symv(const DenseMatrix<T>& a, T alpha, T beta, std::span<const T> x, std::span<T> y) {
    if (a.rows() != a.cols()) throw argument_error(1, "matrix must be square");
    dense_gemv(a, false, alpha, beta, x, y);
}

// ---------------------------------------------------------------------------
// Comparison machinery.
// ---------------------------------------------------------------------------

/// Elementwise tolerance: tol_i = base_ulps * (bw + 2) * eps * scale_i.
/// `bw` counts the stored diagonals a kernel touches per output element.
struct ToleranceModel {
    index_t base_ulps = 16;
    double eps = 0x1.0p-52;
    std::vector<double> norm_scale{1.0};  // size 1 broadcasts to every element

    double scale_at(size_t i) const {
        const double s = norm_scale.size() == 1 ? norm_scale[0] : norm_scale[i];
        return std::max(s, std::numeric_limits<double>::min());
    }
    double tol(index_t bw, size_t i) const {
        return static_cast<double>(base_ulps) * static_cast<double>(bw + 2) * eps * scale_at(i);
    }
};

struct ComparisonReport {
    bool pass = false;
    bool saw_nan = false;
    double max_error = 0.0;       // absolute, at the worst element
    double max_ratio = 0.0;       // error / tolerance at the worst element
    size_t worst_index = 0;
    double worst_tolerance = 0.0;
    std::uint64_t digest = 0;     // FNV-1a over both operands
    std::string describe() const {
        if (saw_nan) return "NaN in comparison";
        return "max |err| " + std::to_string(max_error) + " at [" + std::to_string(worst_index) +
               "], " + std::to_string(max_ratio) + "x tolerance";
    }
};

namespace detail {

template <typename T>
std::uint64_t fnv1a(std::uint64_t h, std::span<const T> v) {
    const auto* p = reinterpret_cast<const unsigned char*>(v.data());
    for (size_t i = 0; i < v.size_bytes(); ++i) h = (h ^ p[i]) * 0x100000001b3ULL;
    return h;
}

}  // namespace detail

template <typename T>
ComparisonReport compare(std::span<const T> actual, std::span<const T> expected,
                         const ToleranceModel& model, index_t bw) {
    if (actual.size() != expected.size())
        throw argument_error(2, "length mismatch: " + std::to_string(actual.size()) + " vs " +
                                    std::to_string(expected.size()));
    if (model.norm_scale.size() != 1 && model.norm_scale.size() != actual.size())
        throw argument_error(3, "norm_scale length mismatch");
    ComparisonReport r;
    r.digest = detail::fnv1a(detail::fnv1a(0xcbf29ce484222325ULL, actual), expected);
    r.pass = true;
    for (size_t i = 0; i < actual.size(); ++i) {
        const double a = static_cast<double>(actual[i]);
        const double e = static_cast<double>(expected[i]);
        if (std::isnan(a) || std::isnan(e)) {
            r.saw_nan = true;
            r.pass = false;
            r.worst_index = i;
            return r;
        }
        const double err = std::abs(a - e);
        const double tol = model.tol(bw, i);
        const double ratio = err / tol;
        if (ratio > r.max_ratio) {
            r.max_ratio = ratio;
            r.max_error = err;
            r.worst_index = i;
            r.worst_tolerance = tol;
        }
        if (err > tol) r.pass = false;
    }
    return r;
}

/// Per-element scale |A|·|x| + |beta|·|y0| for matrix-vector comparisons.
template <typename T>
std::vector<double> gemv_scale(const DenseMatrix<T>& a, bool transposed, T alpha, T beta,
                               std::span<const T> x, std::span<const T> y0) {
    const index_t rows = transposed ? a.cols() : a.rows();
    const index_t cols = transposed ? a.rows() : a.cols();
    std::vector<double> s(static_cast<size_t>(rows), 0.0);
    for (index_t i = 0; i < rows; ++i) {
        double acc = 0.0;
        for (index_t j = 0; j < cols; ++j) {
            const double aij = static_cast<double>(transposed ? a.at(j, i) : a.at(i, j));
            acc += std::abs(aij) * std::abs(static_cast<double>(x[static_cast<size_t>(j)]));
        }
        acc *= std::abs(static_cast<double>(alpha));
        if (beta != T(0) && !y0.empty())
            acc += std::abs(static_cast<double>(beta)) *
                   std::abs(static_cast<double>(y0[static_cast<size_t>(i)]));
        s[static_cast<size_t>(i)] = acc;
    }
    return s;
}

/// Uniform scale max|v_i|, for solves where error mixes across elements.
template <typename T>
std::vector<double> uniform_scale(std::span<const T> v) {
    double m = 0.0;
    for (const T& e : v) m = std::max(m, std::abs(static_cast<double>(e)));
    return {std::max(m, 1.0)};
}

// ---------------------------------------------------------------------------
// Banded naive references for sizes where a dense expansion is impractical
// (benchmark correctness gates at n ~ 10^5).  These walk logical elements
// through the containers' indexed accessors, which are themselves tested
// against the dense layout formulas, and share no code with the kernels.
// ---------------------------------------------------------------------------

template <typename T>
void banded_gemv_check(const GeneralBandMatrix<T>& a, bool transposed, T alpha, T beta,
                       std::span<const T> x, std::span<T> y) {
    const BandLayout& L = a.layout();
    const index_t rows = transposed ? L.n : L.m;
    using A = accum_t<T>;
    for (index_t i = 0; i < rows; ++i) {
        A acc = 0;
        const index_t lo = transposed ? std::max<index_t>(0, i - L.ku)
                                      : std::max<index_t>(0, i - L.kl);
        const index_t hi = transposed ? std::min(L.m - 1, i + L.kl) : std::min(L.n - 1, i + L.ku);
        for (index_t j = lo; j <= hi; ++j) {
            const T aij = transposed ? a.get(j, i) : a.get(i, j);
            acc += static_cast<A>(aij) * static_cast<A>(x[static_cast<size_t>(j)]);
        }
        A out = static_cast<A>(alpha) * acc;
        if (beta != T(0)) out += static_cast<A>(beta) * static_cast<A>(y[static_cast<size_t>(i)]);
        y[static_cast<size_t>(i)] = static_cast<T>(out);
    }
}

template <typename T>
void banded_symv_check(const SymmetricBandMatrix<T>& a, T alpha, T beta, std::span<const T> x,
                       std::span<T> y) {
    const index_t n = a.dim();
    const index_t k = a.k();
    using A = accum_t<T>;
    for (index_t i = 0; i < n; ++i) {
        A acc = 0;
        for (index_t j = std::max<index_t>(0, i - k); j <= std::min(n - 1, i + k); ++j)
            acc += static_cast<A>(a.get(i, j)) * static_cast<A>(x[static_cast<size_t>(j)]);
        A out = static_cast<A>(alpha) * acc;
        if (beta != T(0)) out += static_cast<A>(beta) * static_cast<A>(y[static_cast<size_t>(i)]);
        y[static_cast<size_t>(i)] = static_cast<T>(out);
    }
}

template <typename T>
void banded_trmv_check(const TriangularBandMatrix<T>& a, std::span<const T> x_in,
                       std::span<T> x_out) {
    const index_t n = a.dim();
    const index_t k = a.k();
    const bool t = a.transposed();
    using A = accum_t<T>;
    const Side op_side = t ? (a.side() == Side::lower ? Side::upper : Side::lower) : a.side();
    for (index_t i = 0; i < n; ++i) {
        const index_t lo = op_side == Side::lower ? std::max<index_t>(0, i - k) : i;
        const index_t hi = op_side == Side::lower ? i : std::min(n - 1, i + k);
        A acc = 0;
        for (index_t j = lo; j <= hi; ++j) {
            const T aij = t ? a.get(j, i) : a.get(i, j);
            acc += static_cast<A>(aij) * static_cast<A>(x_in[static_cast<size_t>(j)]);
        }
        x_out[static_cast<size_t>(i)] = static_cast<T>(acc);
    }
}

/// |alpha|·Σ_j |a(i,j)||x_j| + |beta||y0_i| walked over the band only.
template <typename T>
std::vector<double> banded_gemv_scale(const GeneralBandMatrix<T>& a, bool transposed, T alpha,
                                      T beta, std::span<const T> x, std::span<const T> y0) {
    const BandLayout& L = a.layout();
    const index_t rows = transposed ? L.n : L.m;
    std::vector<double> s(static_cast<size_t>(rows), 0.0);
    for (index_t i = 0; i < rows; ++i) {
        double acc = 0.0;
        const index_t lo = transposed ? std::max<index_t>(0, i - L.ku)
                                      : std::max<index_t>(0, i - L.kl);
        const index_t hi = transposed ? std::min(L.m - 1, i + L.kl) : std::min(L.n - 1, i + L.ku);
        for (index_t j = lo; j <= hi; ++j) {
            const T aij = transposed ? a.get(j, i) : a.get(i, j);
            acc += std::abs(static_cast<double>(aij)) *
                   std::abs(static_cast<double>(x[static_cast<size_t>(j)]));
        }
        acc *= std::abs(static_cast<double>(alpha));
        if (beta != T(0) && !y0.empty())
            acc += std::abs(static_cast<double>(beta)) *
                   std::abs(static_cast<double>(y0[static_cast<size_t>(i)]));
        s[static_cast<size_t>(i)] = acc;
    }
    return s;
}

template <typename T>
std::vector<double> banded_symv_scale(const SymmetricBandMatrix<T>& a, T alpha, T beta,
                                      std::span<const T> x, std::span<const T> y0) {
    const index_t n = a.dim();
    const index_t k = a.k();
    std::vector<double> s(static_cast<size_t>(n), 0.0);
    for (index_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (index_t j = std::max<index_t>(0, i - k); j <= std::min(n - 1, i + k); ++j)
            acc += std::abs(static_cast<double>(a.get(i, j))) *
                   std::abs(static_cast<double>(x[static_cast<size_t>(j)]));
        acc *= std::abs(static_cast<double>(alpha));
        if (beta != T(0) && !y0.empty())
            acc += std::abs(static_cast<double>(beta)) *
                   std::abs(static_cast<double>(y0[static_cast<size_t>(i)]));
        s[static_cast<size_t>(i)] = acc;
    }
    return s;
}

template <typename T>
std::vector<double> banded_trmv_scale(const TriangularBandMatrix<T>& a, std::span<const T> x_in) {
    const index_t n = a.dim();
    const index_t k = a.k();
    const bool t = a.transposed();
    const Side op_side = t ? (a.side() == Side::lower ? Side::upper : Side::lower) : a.side();
    std::vector<double> s(static_cast<size_t>(n), 0.0);
    for (index_t i = 0; i < n; ++i) {
        const index_t lo = op_side == Side::lower ? std::max<index_t>(0, i - k) : i;
        const index_t hi = op_side == Side::lower ? i : std::min(n - 1, i + k);
        double acc = 0.0;
        for (index_t j = lo; j <= hi; ++j)
            acc += std::abs(static_cast<double>(t ? a.get(j, i) : a.get(i, j))) *
                   std::abs(static_cast<double>(x_in[static_cast<size_t>(j)]));
        s[static_cast<size_t>(i)] = acc;
    }
    return s;
}

/// Residual gate for large solves: max_i |op(A)x - b|_i and the bound
/// 32·(k+1)·eps·|A|inf·|x|inf it must stay under.
template <typename T>
bool banded_trsv_residual_check(const TriangularBandMatrix<T>& a, std::span<const T> x,
                                std::span<const T> b, double* residual_out = nullptr,
                                double* bound_out = nullptr) {
    const index_t n = a.dim();
    const index_t k = a.k();
    std::vector<T> ax(static_cast<size_t>(n));
    banded_trmv_check(a, x, std::span<T>(ax));
    double res = 0.0;
    for (index_t i = 0; i < n; ++i) {
        const double d = std::abs(static_cast<double>(ax[static_cast<size_t>(i)]) -
                                  static_cast<double>(b[static_cast<size_t>(i)]));
        if (std::isnan(d)) return false;
        res = std::max(res, d);
    }
    double norm_a = 0.0;
    for (index_t i = 0; i < n; ++i) {
        double row = 0.0;
        const Side op_side = a.transposed()
                                 ? (a.side() == Side::lower ? Side::upper : Side::lower)
                                 : a.side();
        const index_t lo = op_side == Side::lower ? std::max<index_t>(0, i - k) : i;
        const index_t hi = op_side == Side::lower ? i : std::min(n - 1, i + k);
        for (index_t j = lo; j <= hi; ++j)
            row += std::abs(static_cast<double>(a.transposed() ? a.get(j, i) : a.get(i, j)));
        norm_a = std::max(norm_a, row);
    }
    double norm_x = 0.0;
    for (const T& v : x) {
        if (std::isnan(static_cast<double>(v))) return false;
        norm_x = std::max(norm_x, std::abs(static_cast<double>(v)));
    }
    const double bound =
        32.0 * static_cast<double>(k + 1) * epsilon(precision_of_v<T>) * norm_a * norm_x;
    if (residual_out) *residual_out = res;
    if (bound_out) *bound_out = bound;
    return res <= bound;
}

}  // namespace bandblas::oracle
