#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "bandblas/band_matrix.hpp"
#include "bandblas/generate.hpp"
#include "bandblas/oracle.hpp"

using namespace bandblas;

TEST_CASE("dense_gemv basics") {
    DenseMatrix<double> eye(3, 3);
    for (index_t i = 0; i < 3; ++i) eye.at(i, i) = 1;
    std::vector<double> x{4, 5, 6}, y(3, 0);
    oracle::dense_gemv<double>(eye, false, 1, 0, x, y);
    CHECK(y == x);

    DenseMatrix<double> a(2, 2);
    a.at(0, 0) = 1;
    a.at(0, 1) = 2;
    a.at(1, 0) = 3;
    a.at(1, 1) = 4;
    std::vector<double> x2{1, 1}, y2(2, 0);
    oracle::dense_gemv<double>(a, false, 1, 0, x2, y2);
    CHECK(y2 == std::vector<double>{3, 7});
    oracle::dense_gemv<double>(a, true, 1, 0, x2, y2);
    CHECK(y2 == std::vector<double>{4, 6});
}

TEST_CASE("dense_gemv beta zero never reads y") {
    DenseMatrix<double> a(2, 2);
    a.at(0, 0) = 2;
    a.at(1, 1) = 2;
    std::vector<double> x{1, 1};
    std::vector<double> y{std::nan(""), std::nan("")};
    oracle::dense_gemv<double>(a, false, 1, 0, x, y);
    CHECK(y == std::vector<double>{2, 2});
}

TEST_CASE("dense_trsv identity and singularity") {
    DenseMatrix<double> eye(3, 3);
    for (index_t i = 0; i < 3; ++i) eye.at(i, i) = 1;
    std::vector<double> b{1, 2, 3};
    oracle::dense_trsv<double>(eye, false, Side::lower, b);
    CHECK(b == std::vector<double>{1, 2, 3});

    DenseMatrix<double> sing(2, 2);
    sing.at(1, 0) = 1;  // zero diagonal
    std::vector<double> c{1, 1};
    CHECK_THROWS_AS(oracle::dense_trsv<double>(sing, false, Side::lower, c),
                    oracle::singular_error);
}

TEST_CASE("dense_symv matches the symmetric fixture") {
    SymmetricBandMatrix<double> s(3, 1, Side::lower);
    s.set(0, 0, 1);
    s.set(1, 1, 2);
    s.set(2, 2, 3);
    s.set(1, 0, 4);
    s.set(2, 1, 5);
    auto d = to_dense(s);
    std::vector<double> x{1, 1, 1}, y(3, 0);
    oracle::dense_symv<double>(d, 1, 0, x, y);
    CHECK(y == std::vector<double>{5, 11, 8});
}

TEST_CASE("dense_trmv unit diagonal identity") {
    TriangularBandMatrix<double> t(4, 0, Side::lower, false, /*unit=*/true);
    auto d = to_dense(t);  // expands the implicit ones
    std::vector<double> x{1, 2, 3, 4};
    oracle::dense_trmv<double>(d, false, x);
    CHECK(x == std::vector<double>{1, 2, 3, 4});
}

TEST_CASE("trsv then trmv recovers the right-hand side") {
    for (auto side : {Side::lower, Side::upper}) {
        for (index_t k : {0L, 1L, 4L}) {
            const index_t n = 20;
            auto a = random_triangular<double>(n, k, side, 17, /*solvable=*/true);
            auto d = to_dense(a);
            auto b = random_vector<double>(n, 18);
            auto x = b;
            oracle::dense_trsv<double>(d, false, side, x);
            auto bx = x;
            oracle::dense_trmv<double>(d, false, bx);
            double norm_b = 0;
            for (double v : b) norm_b = std::max(norm_b, std::abs(v));
            const double tol = 64.0 * static_cast<double>(k + 1) * 0x1.0p-52 * std::max(norm_b, 1.0);
            for (index_t i = 0; i < n; ++i)
                CHECK(std::abs(bx[static_cast<size_t>(i)] - b[static_cast<size_t>(i)]) <= tol);
        }
    }
}

TEST_CASE("compare passes identical vectors with zero error") {
    std::vector<double> v{1, 2, 3};
    auto r = oracle::compare<double>(v, v, {}, 1);
    CHECK(r.pass);
    CHECK(r.max_error == 0.0);
}

TEST_CASE("compare fails a perturbed element at its index") {
    std::vector<double> e{1, 1, 1, 1};
    std::vector<double> a = e;
    a[2] += 1e6 * 0x1.0p-52;  // far beyond 16*(bw+2) ulps of scale 1
    auto r = oracle::compare<double>(a, e, {}, 1);
    CHECK_FALSE(r.pass);
    CHECK(r.worst_index == 2);
    CHECK(r.max_error > 0);
}

TEST_CASE("compare flags NaN and mismatched lengths") {
    std::vector<double> e{1, 2};
    std::vector<double> a{1, std::nan("")};
    auto r = oracle::compare<double>(a, e, {}, 1);
    CHECK_FALSE(r.pass);
    CHECK(r.saw_nan);

    std::vector<double> b{1};
    CHECK_THROWS_AS(oracle::compare<double>(b, e, {}, 1), argument_error);
}

TEST_CASE("tolerance scales with bandwidth and norm") {
    oracle::ToleranceModel m;
    m.norm_scale = {2.0};
    CHECK(m.tol(0, 0) == 16.0 * 2.0 * 0x1.0p-52 * 2.0);
    CHECK(m.tol(8, 0) == 16.0 * 10.0 * 0x1.0p-52 * 2.0);
    // zero scale is floored so the tolerance stays positive
    m.norm_scale = {0.0};
    CHECK(m.tol(1, 0) > 0.0);
}

TEST_CASE("gemv_scale mirrors the error magnitude model") {
    DenseMatrix<double> a(2, 2);
    a.at(0, 0) = -2;
    a.at(0, 1) = 3;
    a.at(1, 1) = 4;
    std::vector<double> x{1, -1}, y0{10, -10};
    auto s = oracle::gemv_scale<double>(a, false, 2.0, 0.5, x, y0);
    CHECK(s[0] == doctest::Approx(2.0 * (2 + 3) + 0.5 * 10));
    CHECK(s[1] == doctest::Approx(2.0 * 4 + 0.5 * 10));
}

TEST_CASE("banded checks agree with dense references on small sizes") {
    const index_t n = 17;
    {
        auto a = random_general<double>(n, n, 3, 2, 5);
        auto x = random_vector<double>(n, 6);
        auto y = random_vector<double>(n, 7);
        auto y_banded = y;
        oracle::banded_gemv_check<double>(a, true, 1.25, -0.5, x, y_banded);
        auto y_dense = y;
        oracle::dense_gemv<double>(to_dense(a), true, 1.25, -0.5, x, y_dense);
        for (index_t i = 0; i < n; ++i)
            CHECK(y_banded[static_cast<size_t>(i)] ==
                  doctest::Approx(y_dense[static_cast<size_t>(i)]).epsilon(1e-12));
    }
    {
        auto a = random_symmetric<double>(n, 2, Side::upper, 8);
        auto x = random_vector<double>(n, 9);
        auto y = random_vector<double>(n, 10);
        auto y_banded = y;
        oracle::banded_symv_check<double>(a, 0.75, 2.0, x, y_banded);
        auto y_dense = y;
        oracle::dense_symv<double>(to_dense(a), 0.75, 2.0, x, y_dense);
        for (index_t i = 0; i < n; ++i)
            CHECK(y_banded[static_cast<size_t>(i)] ==
                  doctest::Approx(y_dense[static_cast<size_t>(i)]).epsilon(1e-12));
    }
    {
        auto a = random_triangular<double>(n, 3, Side::upper, 11, false, /*transposed=*/true);
        auto x = random_vector<double>(n, 12);
        std::vector<double> out(static_cast<size_t>(n));
        oracle::banded_trmv_check<double>(a, x, out);
        auto x_dense = x;
        oracle::dense_trmv<double>(to_dense(a), true, x_dense);
        for (index_t i = 0; i < n; ++i)
            CHECK(out[static_cast<size_t>(i)] ==
                  doctest::Approx(x_dense[static_cast<size_t>(i)]).epsilon(1e-12));
    }
}

TEST_CASE("residual gate accepts exact solves and rejects corruption") {
    const index_t n = 40, k = 3;
    auto a = random_triangular<double>(n, k, Side::lower, 21, /*solvable=*/true);
    auto b = random_vector<double>(n, 22);
    auto x = b;
    oracle::dense_trsv<double>(to_dense(a), false, Side::lower, x);
    double res = 0, bound = 0;
    CHECK(oracle::banded_trsv_residual_check<double>(a, x, b, &res, &bound));
    CHECK(res <= bound);

    auto bad = x;
    bad[10] += 1e-3;
    CHECK_FALSE(oracle::banded_trsv_residual_check<double>(a, bad, b));
}
