#include <random>

#include "doctest.h"
#include "support/oracles.hpp"
#include "utpm/error.hpp"
#include "utpm/pullback.hpp"

using namespace utpm;
using namespace utpm::testing;

namespace {

void check_pairing(const TaylorScalar& fd, const TaylorScalar& adjoint) {
    for (std::size_t d = 0; d <= fd.degree(); ++d) {
        CAPTURE(d);
        CHECK(std::abs(fd[d] - adjoint[d]) <= 1e-4 * std::max(1.0, std::abs(adjoint[d])));
    }
}

}  // namespace

TEST_CASE("mul pullback: examples") {
    const TaylorMatrix i = TaylorMatrix::identity(3, 0);
    TaylorMatrix xbar(3, 3, 0), ybar(3, 3, 0);
    pullback::mul(i, i, i, xbar, ybar);
    CHECK(xbar == i);
    CHECK(ybar == i);

    // z = x*y with zbar = 1: xbar += y, ybar += x.
    const TaylorMatrix x = TaylorMatrix::from_scalar({2.5}), y = TaylorMatrix::from_scalar({-4.0});
    TaylorMatrix sx(1, 1, 0), sy(1, 1, 0);
    pullback::mul(TaylorMatrix::from_scalar({1.0}), x, y, sx, sy);
    CHECK(sx[0](0, 0) == -4.0);
    CHECK(sy[0](0, 0) == 2.5);

    TaylorMatrix wrong(2, 2, 0);
    CHECK_THROWS_AS(pullback::mul(i, i, i, wrong, ybar), ShapeError);
}

TEST_CASE("mul pullback: finite-difference pairing at degree 0") {
    std::mt19937_64 rng(30);
    const TaylorMatrix x = random_taylor(3, 3, 0, rng), y = random_taylor(3, 3, 0, rng);
    const TaylorMatrix zbar = random_taylor(3, 3, 0, rng), dx = random_taylor(3, 3, 0, rng);
    TaylorMatrix xbar(3, 3, 0), ybar(3, 3, 0);
    pullback::mul(zbar, x, y, xbar, ybar);
    const TaylorScalar fd = taylor_central_difference(
        [&](double h) { return taylor_pairing(zbar, from_grid(grid_mul(to_grid(add(x, dx, h)), to_grid(y)), 0)); },
        1e-5);
    CHECK(std::abs(fd[0] - taylor_pairing(xbar, dx)[0]) < 1e-5);
}

TEST_CASE("mul pullback: pairing with rectangular factors at degree 2") {
    std::mt19937_64 rng(31);
    const TaylorMatrix x = random_taylor(2, 4, 2, rng), y = random_taylor(4, 3, 2, rng);
    const TaylorMatrix zbar = random_taylor(2, 3, 2, rng);
    const TaylorMatrix dx = random_taylor(2, 4, 2, rng), dy = random_taylor(4, 3, 2, rng);
    TaylorMatrix xbar(2, 4, 2), ybar(4, 3, 2);
    pullback::mul(zbar, x, y, xbar, ybar);
    const TaylorScalar fd = taylor_central_difference(
        [&](double h) {
            return taylor_pairing(zbar, from_grid(grid_mul(to_grid(add(x, dx, h)), to_grid(add(y, dy, h))), 2));
        },
        1e-5);
    check_pairing(fd, add(taylor_pairing(xbar, dx), taylor_pairing(ybar, dy)));
}

TEST_CASE("inv pullback: examples") {
    // Phi = tr(X^{-1}) at X = 2I: Xbar = -(X^{-2})^T = -I/4.
    const TaylorMatrix y = TaylorMatrix::constant(Matrix{{0.5, 0}, {0, 0.5}}, 0);
    TaylorMatrix xbar(2, 2, 0);
    pullback::inv(TaylorMatrix::identity(2, 0), y, xbar);
    CHECK(xbar[0] == Matrix{{-0.25, 0}, {0, -0.25}});

    TaylorMatrix untouched(2, 2, 0);
    pullback::inv(TaylorMatrix(2, 2, 0), y, untouched);
    CHECK(untouched == TaylorMatrix(2, 2, 0));
}

TEST_CASE("inv pullback: Taylor-valued pairing") {
    std::mt19937_64 rng(32);
    for (std::size_t degree : {0u, 1u, 3u}) {
        CAPTURE(degree);
        const TaylorMatrix x = random_taylor(3, 3, degree, rng, 3.0);
        const TaylorMatrix ybar = random_taylor(3, 3, degree, rng), dx = random_taylor(3, 3, degree, rng);
        TaylorMatrix xbar(3, 3, degree);
        pullback::inv(ybar, inv(x), xbar);
        const TaylorScalar fd = taylor_central_difference(
            [&](double h) { return taylor_pairing(ybar, from_grid(grid_inverse(to_grid(add(x, dx, h))), degree)); },
            1e-5);
        check_pairing(fd, taylor_pairing(xbar, dx));
    }
}

TEST_CASE("transpose pullback") {
    TaylorMatrix xbar(3, 3, 0);
    pullback::transpose(TaylorMatrix::identity(3, 0), xbar);
    CHECK(xbar == TaylorMatrix::identity(3, 0));

    std::mt19937_64 rng(33);
    const TaylorMatrix ybar = random_taylor(3, 2, 1, rng), dx = random_taylor(2, 3, 1, rng);
    TaylorMatrix once(2, 3, 1), twice(3, 2, 1);
    pullback::transpose(ybar, once);
    pullback::transpose(once, twice);
    CHECK(twice == ybar);

    // tr(Xbar^T dX) == tr(Ybar^T dX^T)
    const TaylorScalar lhs = taylor_pairing(once, dx), rhs = taylor_pairing(ybar, transpose(dx));
    for (std::size_t d = 0; d <= 1; ++d) CHECK(lhs[d] == doctest::Approx(rhs[d]).epsilon(1e-14));

    TaylorMatrix wrong(3, 2, 1);
    CHECK_THROWS_AS(pullback::transpose(ybar, wrong), ShapeError);
}

TEST_CASE("trace pullback") {
    TaylorMatrix xbar(2, 2, 1);
    pullback::trace({1, 0}, 2, xbar);
    CHECK(xbar == TaylorMatrix::identity(2, 1));

    TaylorMatrix zero(2, 2, 1);
    pullback::trace({0, 0}, 2, zero);
    CHECK(zero == TaylorMatrix(2, 2, 1));

    TaylorMatrix scaled(3, 3, 1);
    pullback::trace({2, 3}, 3, scaled);
    Matrix two = Matrix::identity(3), three = Matrix::identity(3);
    two *= 2.0;
    three *= 3.0;
    CHECK(scaled[0] == two);
    CHECK(scaled[1] == three);

    std::mt19937_64 rng(34);
    const TaylorMatrix x = random_taylor(3, 3, 2, rng), dx = random_taylor(3, 3, 2, rng);
    const TaylorScalar ybar = random_scalar(2, rng);
    TaylorMatrix xb(3, 3, 2);
    pullback::trace(ybar, 3, xb);
    const TaylorScalar fd = taylor_central_difference(
        [&](double h) { return mul(ybar, grid_trace(to_grid(add(x, dx, h)))); }, 1e-5);
    check_pairing(fd, taylor_pairing(xb, dx));
}

TEST_CASE("add pullback") {
    const TaylorMatrix zbar = TaylorMatrix::identity(2, 1);
    TaylorMatrix abar(2, 2, 1), bbar(2, 2, 1);
    pullback::add(zbar, -3.0, abar, bbar);
    CHECK(abar == zbar);
    CHECK(bbar[0] == Matrix{{-3, 0}, {0, -3}});
}
