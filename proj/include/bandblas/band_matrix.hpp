#pragma once

#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "bandblas/band_layout.hpp"
#include "bandblas/types.hpp"

namespace bandblas {

namespace detail {

// Out-of-band slots are poisoned in debug builds so an illegal read surfaces
// as NaN in results; release builds zero-fill.
template <typename T>
constexpr T padding_fill() {
#ifndef NDEBUG
    return std::numeric_limits<T>::quiet_NaN();
#else
    return T(0);
#endif
}

}  // namespace detail

template <typename T>
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(index_t m, index_t n) : m_(m), n_(n), a_(static_cast<size_t>(m * n), T(0)) {}

    index_t rows() const { return m_; }
    index_t cols() const { return n_; }

    T& at(index_t i, index_t j) { return a_[static_cast<size_t>(i * n_ + j)]; }
    const T& at(index_t i, index_t j) const { return a_[static_cast<size_t>(i * n_ + j)]; }

    std::span<T> data() { return a_; }
    std::span<const T> data() const { return a_; }

private:
    index_t m_ = 0;
    index_t n_ = 0;
    std::vector<T> a_;  // row-major
};

/// General m x n band matrix in OpenBLAS column-major band storage.
template <typename T>
class GeneralBandMatrix {
public:
    using value_type = T;

    GeneralBandMatrix(index_t m, index_t n, index_t kl, index_t ku, index_t lda = -1)
        : layout_{m, n, kl, ku, lda < 0 ? kl + ku + 1 : lda} {
        layout_.validate();
        data_.assign(static_cast<size_t>(layout_.panel_size()), detail::padding_fill<T>());
        clear();
    }

    /// Adopts an existing storage panel; size must cover lda * n.
    GeneralBandMatrix(BandLayout layout, std::vector<T> data)
        : layout_(layout), data_(std::move(data)) {
        layout_.validate();
        if (static_cast<index_t>(data_.size()) < layout_.panel_size())
            throw argument_error(2, "data holds " + std::to_string(data_.size()) +
                                        " elements, panel needs " +
                                        std::to_string(layout_.panel_size()));
    }

    static constexpr Precision precision() { return precision_of_v<T>; }
    const BandLayout& layout() const { return layout_; }
    index_t rows() const { return layout_.m; }
    index_t cols() const { return layout_.n; }

    std::span<const T> data() const { return data_; }
    std::span<T> data() { return data_; }

    T get(index_t i, index_t j) const { return data_[static_cast<size_t>(index(i, j))]; }
    void set(index_t i, index_t j, T v) { data_[static_cast<size_t>(index(i, j))] = v; }

    index_t index(index_t i, index_t j) const { return band_index_general(layout_, i, j); }

    /// Zero all in-band slots (padding keeps its canary fill).
    void clear() {
        for (index_t j = 0; j < layout_.n; ++j)
            for (index_t i = std::max<index_t>(0, j - layout_.ku);
                 i <= std::min(layout_.m - 1, j + layout_.kl); ++i)
                set(i, j, T(0));
    }

private:
    BandLayout layout_;
    std::vector<T> data_;
};

/// Triangular n x n band matrix with k side diagonals; one triangle stored.
/// The transposed flag is an operator property honored by kernels; indexing
/// always addresses the stored triangle.
template <typename T>
class TriangularBandMatrix {
public:
    using value_type = T;

    TriangularBandMatrix(index_t n, index_t k, Side side, bool transposed = false,
                         bool unit_diagonal = false, index_t lda = -1)
        : layout_{n,
                  n,
                  side == Side::lower ? k : 0,
                  side == Side::upper ? k : 0,
                  lda < 0 ? k + 1 : lda},
          side_(side),
          transposed_(transposed),
          unit_diagonal_(unit_diagonal) {
        if (k < 0) throw argument_error(2, "k (=" + std::to_string(k) + ") must be >= 0");
        if (layout_.lda < k + 1)
            throw argument_error(6, "lda (=" + std::to_string(layout_.lda) +
                                        ") must be >= k + 1 (=" + std::to_string(k + 1) + ")");
        layout_.validate();
        data_.assign(static_cast<size_t>(layout_.panel_size()), detail::padding_fill<T>());
        clear();
    }

    static constexpr Precision precision() { return precision_of_v<T>; }
    const BandLayout& layout() const { return layout_; }
    index_t dim() const { return layout_.n; }
    index_t k() const { return side_ == Side::lower ? layout_.kl : layout_.ku; }
    Side side() const { return side_; }
    bool transposed() const { return transposed_; }
    void set_transposed(bool t) { transposed_ = t; }
    bool unit_diagonal() const { return unit_diagonal_; }

    std::span<const T> data() const { return data_; }
    std::span<T> data() { return data_; }

    /// Stored value at (i, j); exactly 1 on the diagonal of a unit-diagonal
    /// matrix regardless of the slot contents.
    T get(index_t i, index_t j) const {
        if (unit_diagonal_ && i == j && i >= 0 && i < layout_.n) return T(1);
        return data_[static_cast<size_t>(index(i, j))];
    }
    void set(index_t i, index_t j, T v) { data_[static_cast<size_t>(index(i, j))] = v; }

    index_t index(index_t i, index_t j) const {
        return band_index_triangular(side_, layout_.n, k(), layout_.lda, i, j);
    }

    void clear() {
        const index_t kk = k();
        for (index_t j = 0; j < layout_.n; ++j) {
            const index_t lo = side_ == Side::lower ? j : std::max<index_t>(0, j - kk);
            const index_t hi = side_ == Side::lower ? std::min(layout_.n - 1, j + kk) : j;
            for (index_t i = lo; i <= hi; ++i) set(i, j, T(0));
        }
    }

private:
    BandLayout layout_;
    Side side_;
    bool transposed_;
    bool unit_diagonal_;
    std::vector<T> data_;
};

/// Symmetric n x n band matrix with k diagonals on each side; only the `side`
/// triangle is stored, the other is implied by A(i,j) = A(j,i).
template <typename T>
class SymmetricBandMatrix {
public:
    using value_type = T;

    SymmetricBandMatrix(index_t n, index_t k, Side side, index_t lda = -1)
        : layout_{n,
                  n,
                  side == Side::lower ? k : 0,
                  side == Side::upper ? k : 0,
                  lda < 0 ? k + 1 : lda},
          side_(side) {
        if (k < 0) throw argument_error(2, "k (=" + std::to_string(k) + ") must be >= 0");
        if (layout_.lda < k + 1)
            throw argument_error(4, "lda (=" + std::to_string(layout_.lda) +
                                        ") must be >= k + 1 (=" + std::to_string(k + 1) + ")");
        layout_.validate();
        data_.assign(static_cast<size_t>(layout_.panel_size()), detail::padding_fill<T>());
        clear();
    }

    static constexpr Precision precision() { return precision_of_v<T>; }
    const BandLayout& layout() const { return layout_; }
    index_t dim() const { return layout_.n; }
    index_t k() const { return side_ == Side::lower ? layout_.kl : layout_.ku; }
    Side side() const { return side_; }

    std::span<const T> data() const { return data_; }
    std::span<T> data() { return data_; }

    /// Logical element (i, j); accesses in the unstored triangle resolve to
    /// the stored mirror.
    T get(index_t i, index_t j) const { return data_[static_cast<size_t>(index(i, j))]; }
    void set(index_t i, index_t j, T v) { data_[static_cast<size_t>(index(i, j))] = v; }

    index_t index(index_t i, index_t j) const {
        const bool stored = side_ == Side::lower ? i >= j : i <= j;
        if (!stored) std::swap(i, j);
        return band_index_triangular(side_, layout_.n, k(), layout_.lda, i, j);
    }

    void clear() {
        const index_t kk = k();
        for (index_t j = 0; j < layout_.n; ++j) {
            const index_t lo = side_ == Side::lower ? j : std::max<index_t>(0, j - kk);
            const index_t hi = side_ == Side::lower ? std::min(layout_.n - 1, j + kk) : j;
            for (index_t i = lo; i <= hi; ++i) set(i, j, T(0));
        }
    }

private:
    BandLayout layout_;
    Side side_;
    std::vector<T> data_;
};

/// Expands to a dense matrix with zeros outside the band.  Symmetry and the
/// unit-diagonal convention are applied; the transposed flag is not (callers
/// pass it to the dense routine instead).
template <typename T>
DenseMatrix<T> to_dense(const GeneralBandMatrix<T>& a) {
    const BandLayout& L = a.layout();
    DenseMatrix<T> d(L.m, L.n);
    for (index_t j = 0; j < L.n; ++j)
        for (index_t i = std::max<index_t>(0, j - L.ku); i <= std::min(L.m - 1, j + L.kl); ++i)
            d.at(i, j) = a.get(i, j);
    return d;
}

template <typename T>
DenseMatrix<T> to_dense(const TriangularBandMatrix<T>& a) {
    const index_t n = a.dim();
    const index_t k = a.k();
    DenseMatrix<T> d(n, n);
    for (index_t j = 0; j < n; ++j) {
        const index_t lo = a.side() == Side::lower ? j : std::max<index_t>(0, j - k);
        const index_t hi = a.side() == Side::lower ? std::min(n - 1, j + k) : j;
        for (index_t i = lo; i <= hi; ++i) d.at(i, j) = a.get(i, j);
    }
    return d;
}

template <typename T>
DenseMatrix<T> to_dense(const SymmetricBandMatrix<T>& a) {
    const index_t n = a.dim();
    const index_t k = a.k();
    DenseMatrix<T> d(n, n);
    for (index_t j = 0; j < n; ++j)
        for (index_t i = std::max<index_t>(0, j - k); i <= std::min(n - 1, j + k); ++i)
            d.at(i, j) = a.get(i, j);
    return d;
}

}  // namespace bandblas
