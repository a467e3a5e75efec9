#pragma once

#include <string>

#include "bandblas/types.hpp"

namespace bandblas {

/// Dimensions and diagonal counts of a column-major band storage panel.
///
/// An m x n matrix with kl sub-diagonals and ku super-diagonals is stored as
/// a flat array of lda * n elements; element (i, j) with j - ku <= i <= j + kl
/// lives at data[j * lda + ku + i - j].  lda >= kl + ku + 1; extra rows of the
/// panel are padding and are never read by any kernel.
struct BandLayout {
    index_t m = 0;
    index_t n = 0;
    index_t kl = 0;
    index_t ku = 0;
    index_t lda = 0;

    index_t panel_size() const { return lda * n; }

    bool in_band(index_t i, index_t j) const {
        return i >= 0 && i < m && j >= 0 && j < n && i - j <= kl && j - i <= ku;
    }

    /// Throws argument_error (1-based field position: m=1, n=2, kl=3, ku=4, lda=5)
    /// on an invalid combination.
    void validate() const {
        if (m < 1) throw argument_error(1, "m (=" + std::to_string(m) + ") must be >= 1");
        if (n < 1) throw argument_error(2, "n (=" + std::to_string(n) + ") must be >= 1");
        if (kl < 0) throw argument_error(3, "kl (=" + std::to_string(kl) + ") must be >= 0");
        if (ku < 0) throw argument_error(4, "ku (=" + std::to_string(ku) + ") must be >= 0");
        if (lda < kl + ku + 1)
            throw argument_error(5, "lda (=" + std::to_string(lda) + ") must be >= kl + ku + 1 (=" +
                                        std::to_string(kl + ku + 1) + ")");
    }
};

/// Flat offset of in-band element (i, j) of a general band matrix.
inline index_t band_index_general(const BandLayout& layout, index_t i, index_t j) {
    if (!layout.in_band(i, j))
        throw band_error("element (" + std::to_string(i) + ", " + std::to_string(j) +
                         ") is outside the stored band");
    return j * layout.lda + layout.ku + i - j;
}

/// Flat offset of in-band element (i, j) of a one-triangle band container with
/// k side diagonals.  Lower: j <= i <= j + k at j*lda + (i - j); upper:
/// j - k <= i <= j at j*lda + k + (i - j).
inline index_t band_index_triangular(Side side, index_t n, index_t k, index_t lda, index_t i,
                                     index_t j) {
    const bool inside = i >= 0 && i < n && j >= 0 && j < n &&
                        (side == Side::lower ? (i >= j && i - j <= k) : (i <= j && j - i <= k));
    if (!inside)
        throw band_error("element (" + std::to_string(i) + ", " + std::to_string(j) +
                         ") is outside the stored triangle band");
    return side == Side::lower ? j * lda + (i - j) : j * lda + k + (i - j);
}

}  // namespace bandblas
