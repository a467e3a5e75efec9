#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "bandblas/band_matrix.hpp"
#include "bandblas/types.hpp"

namespace bandblas {

/// Deterministic 64-bit stream generator (splitmix64).  Same seed, same
/// sequence on every platform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform draw in [-1, 1] built from the top 53 bits.
    double next_signed_unit() {
        const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        return 2.0 * u - 1.0;
    }

private:
    std::uint64_t state_;
};

template <typename T>
GeneralBandMatrix<T> random_general(index_t m, index_t n, index_t kl, index_t ku,
                                    std::uint64_t seed, index_t lda = -1) {
    GeneralBandMatrix<T> a(m, n, kl, ku, lda);
    SplitMix64 rng(seed);
    for (index_t j = 0; j < n; ++j)
        for (index_t i = std::max<index_t>(0, j - ku); i <= std::min(m - 1, j + kl); ++i)
            a.set(i, j, static_cast<T>(rng.next_signed_unit()));
    return a;
}

/// Random triangular band matrix.  With solvable=true the diagonal is pushed
/// to magnitude >= k + 2 while every off-diagonal stays in [-1, 1]; each row
/// has at most k off-diagonal entries, so the matrix is strictly diagonally
/// dominant and safely invertible.
template <typename T>
TriangularBandMatrix<T> random_triangular(index_t n, index_t k, Side side, std::uint64_t seed,
                                          bool solvable = false, bool transposed = false,
                                          bool unit_diagonal = false, index_t lda = -1) {
    TriangularBandMatrix<T> a(n, k, side, transposed, unit_diagonal, lda);
    SplitMix64 rng(seed);
    for (index_t j = 0; j < n; ++j) {
        const index_t lo = side == Side::lower ? j : std::max<index_t>(0, j - k);
        const index_t hi = side == Side::lower ? std::min(n - 1, j + k) : j;
        for (index_t i = lo; i <= hi; ++i) {
            double v = rng.next_signed_unit();
            if (i == j && solvable) v = static_cast<double>(k + 2) + std::abs(v);
            a.set(i, j, static_cast<T>(v));
        }
    }
    return a;
}

template <typename T>
SymmetricBandMatrix<T> random_symmetric(index_t n, index_t k, Side side, std::uint64_t seed,
                                        index_t lda = -1) {
    SymmetricBandMatrix<T> a(n, k, side, lda);
    SplitMix64 rng(seed);
    for (index_t j = 0; j < n; ++j) {
        const index_t lo = side == Side::lower ? j : std::max<index_t>(0, j - k);
        const index_t hi = side == Side::lower ? std::min(n - 1, j + k) : j;
        for (index_t i = lo; i <= hi; ++i) a.set(i, j, static_cast<T>(rng.next_signed_unit()));
    }
    return a;
}

template <typename T>
std::vector<T> random_vector(index_t n, std::uint64_t seed) {
    std::vector<T> x(static_cast<size_t>(n));
    SplitMix64 rng(seed);
    for (auto& v : x) v = static_cast<T>(rng.next_signed_unit());
    return x;
}

// ---------------------------------------------------------------------------
// Text fixtures.  Layout:
//   line 1:  kind m n kl ku lda precision
//   line 2+: the storage panel, one column of lda values per line
// kind is general, triangular, or symmetric; for the latter two the side is
// the nonzero one of kl/ku (k = 0 stores as lower).  Padding slots are
// written as 0 so files stay readable by any float parser.
// ---------------------------------------------------------------------------

struct FixtureFile {
    std::string kind;
    index_t m = 0;
    index_t n = 0;
    index_t kl = 0;
    index_t ku = 0;
    index_t lda = 0;
    Precision precision = Precision::f64;
    std::vector<double> panel;  // lda * n values, column-major
};

class fixture_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void write_fixture(std::ostream& os, const FixtureFile& f) {
    os << f.kind << ' ' << f.m << ' ' << f.n << ' ' << f.kl << ' ' << f.ku << ' ' << f.lda << ' '
       << to_string(f.precision) << '\n';
    os.precision(17);
    for (index_t j = 0; j < f.n; ++j) {
        for (index_t r = 0; r < f.lda; ++r) {
            const double v = f.panel[static_cast<size_t>(j * f.lda + r)];
            if (r) os << ' ';
            os << (std::isfinite(v) ? v : 0.0);
        }
        os << '\n';
    }
}

inline FixtureFile read_fixture(std::istream& is) {
    FixtureFile f;
    std::string prec;
    if (!(is >> f.kind >> f.m >> f.n >> f.kl >> f.ku >> f.lda >> prec))
        throw fixture_error("malformed fixture header");
    if (f.kind != "general" && f.kind != "triangular" && f.kind != "symmetric")
        throw fixture_error("unknown fixture kind: " + f.kind);
    if (prec == "f32")
        f.precision = Precision::f32;
    else if (prec == "f64")
        f.precision = Precision::f64;
    else
        throw fixture_error("unknown fixture precision: " + prec);
    if (f.m < 1 || f.n < 1 || f.kl < 0 || f.ku < 0 || f.lda < f.kl + f.ku + 1)
        throw fixture_error("inconsistent fixture dimensions");
    f.panel.resize(static_cast<size_t>(f.lda * f.n));
    for (auto& v : f.panel)
        if (!(is >> v)) throw fixture_error("fixture panel truncated");
    return f;
}

template <typename T>
GeneralBandMatrix<T> fixture_general(const FixtureFile& f) {
    if (f.kind != "general") throw fixture_error("fixture kind is " + f.kind + ", not general");
    GeneralBandMatrix<T> a(f.m, f.n, f.kl, f.ku, f.lda);
    for (index_t j = 0; j < f.n; ++j)
        for (index_t i = std::max<index_t>(0, j - f.ku); i <= std::min(f.m - 1, j + f.kl); ++i)
            a.set(i, j, static_cast<T>(f.panel[static_cast<size_t>(a.index(i, j))]));
    return a;
}

template <typename T>
TriangularBandMatrix<T> fixture_triangular(const FixtureFile& f, bool transposed = false,
                                           bool unit_diagonal = false) {
    if (f.kind != "triangular")
        throw fixture_error("fixture kind is " + f.kind + ", not triangular");
    if (f.m != f.n)
        throw fixture_error("triangular fixture must be square, got " + std::to_string(f.m) +
                            " x " + std::to_string(f.n));
    const Side side = f.ku > 0 ? Side::upper : Side::lower;
    const index_t k = side == Side::upper ? f.ku : f.kl;
    TriangularBandMatrix<T> a(f.n, k, side, transposed, unit_diagonal, f.lda);
    for (index_t j = 0; j < f.n; ++j) {
        const index_t lo = side == Side::lower ? j : std::max<index_t>(0, j - k);
        const index_t hi = side == Side::lower ? std::min(f.n - 1, j + k) : j;
        for (index_t i = lo; i <= hi; ++i)
            a.set(i, j, static_cast<T>(f.panel[static_cast<size_t>(a.index(i, j))]));
    }
    return a;
}

template <typename T>
SymmetricBandMatrix<T> fixture_symmetric(const FixtureFile& f) {
    if (f.kind != "symmetric") throw fixture_error("fixture kind is " + f.kind + ", not symmetric");
    if (f.m != f.n)
        throw fixture_error("symmetric fixture must be square, got " + std::to_string(f.m) +
                            " x " + std::to_string(f.n));
    const Side side = f.ku > 0 ? Side::upper : Side::lower;
    const index_t k = side == Side::upper ? f.ku : f.kl;
    SymmetricBandMatrix<T> a(f.n, k, side, f.lda);
    for (index_t j = 0; j < f.n; ++j) {
        const index_t lo = side == Side::lower ? j : std::max<index_t>(0, j - k);
        const index_t hi = side == Side::lower ? std::min(f.n - 1, j + k) : j;
        for (index_t i = lo; i <= hi; ++i)
            a.set(i, j, static_cast<T>(f.panel[static_cast<size_t>(a.index(i, j))]));
    }
    return a;
}

template <typename T>
FixtureFile make_fixture(const GeneralBandMatrix<T>& a) {
    const BandLayout& L = a.layout();
    FixtureFile f{"general", L.m, L.n, L.kl, L.ku, L.lda, precision_of_v<T>, {}};
    f.panel.assign(static_cast<size_t>(L.panel_size()), 0.0);
    for (index_t j = 0; j < L.n; ++j)
        for (index_t i = std::max<index_t>(0, j - L.ku); i <= std::min(L.m - 1, j + L.kl); ++i)
            f.panel[static_cast<size_t>(a.index(i, j))] = static_cast<double>(a.get(i, j));
    return f;
}

}  // namespace bandblas
