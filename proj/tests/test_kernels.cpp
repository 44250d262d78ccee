#include <random>

#include "doctest.h"
#include "support/oracles.hpp"
#include "utpm/error.hpp"
#include "utpm/kernels.hpp"

using namespace utpm;
using utpm::testing::random_matrix;

TEST_CASE("parallel gemm matches the serial reference exactly") {
    std::mt19937_64 rng(5);
    for (std::size_t n : {1u, 3u, 17u, 40u, 96u}) {
        const Matrix a = random_matrix(n, n + 3, rng), b = random_matrix(n + 3, n, rng);
        Matrix c(n, n), ref(n, n);
        kernels::gemm(a, b, c);
        kernels::reference::gemm(a, b, ref);
        CHECK(c == ref);

        kernels::gemm(a, b, c, true);
        kernels::reference::gemm(a, b, ref, true);
        CHECK(c == ref);
    }
}

TEST_CASE("gemm agrees with a naive product and rejects bad shapes") {
    std::mt19937_64 rng(6);
    const Matrix a = random_matrix(4, 7, rng), b = random_matrix(7, 2, rng);
    Matrix c(4, 2);
    kernels::gemm(a, b, c);
    CHECK(max_abs_diff(c, testing::naive_product(a, b)) < 1e-14);
    Matrix wrong(3, 2);
    CHECK_THROWS_AS(kernels::gemm(a, b, wrong), ShapeError);
}

TEST_CASE("parallel LU solve matches the column-by-column reference") {
    std::mt19937_64 rng(7);
    for (std::size_t n : {1u, 5u, 48u, 80u}) {
        const Matrix a = random_matrix(n, n, rng, static_cast<double>(n));
        const Matrix b = random_matrix(n, n, rng);
        const Matrix x = kernels::LuFactorization(a).solve(b);
        CHECK(x == kernels::reference::lu_solve(a, b));
        CHECK(max_abs_diff(testing::naive_product(a, x), b) < 1e-12);
    }
}

TEST_CASE("LU regularity test") {
    const Matrix singular{{1, 2}, {2, 4}};
    CHECK_THROWS_AS(kernels::LuFactorization{singular}, SingularMatrixError);
    try {
        kernels::LuFactorization lu(Matrix{{1, 0}, {0, 1e-14}});
        FAIL("expected SingularMatrixError");
    } catch (const SingularMatrixError& e) {
        CHECK(e.pivot_ratio() == doctest::Approx(1e-14));
        CHECK(e.condition_estimate() > 1e13);
    }
    CHECK_THROWS_AS(kernels::LuFactorization{Matrix(2, 3)}, ShapeError);
    // Just above the threshold is accepted.
    CHECK_NOTHROW(kernels::LuFactorization(Matrix{{1, 0}, {0, 1e-11}}));
}

TEST_CASE("axpy") {
    Matrix y{{1, 2}, {3, 4}};
    kernels::axpy(-2.0, Matrix{{1, 1}, {1, 1}}, y);
    CHECK(y == Matrix{{-1, 0}, {1, 2}});
    CHECK_THROWS_AS(kernels::axpy(1.0, Matrix(1, 2), y), ShapeError);
}
