#pragma once

// Test-only oracles. Everything here works entry by entry on Taylor scalars
// or on plain doubles, so it stays independent of the matrix-level code
// paths under test.

#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include "utpm/matrix.hpp"
#include "utpm/taylor_matrix.hpp"
#include "utpm/taylor_scalar.hpp"

namespace utpm::testing {

/// Row-major matrix of Taylor scalars.
struct ScalarGrid {
    std::size_t rows = 0, cols = 0;
    std::vector<TaylorScalar> cells;

    TaylorScalar& operator()(std::size_t i, std::size_t j) { return cells[i * cols + j]; }
    const TaylorScalar& operator()(std::size_t i, std::size_t j) const { return cells[i * cols + j]; }
};

inline ScalarGrid to_grid(const TaylorMatrix& m) {
    ScalarGrid g{m.rows(), m.cols(), {}};
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) g.cells.push_back(m.entry(i, j));
    return g;
}

inline TaylorMatrix from_grid(const ScalarGrid& g, std::size_t degree) {
    TaylorMatrix m(g.rows, g.cols, degree);
    for (std::size_t i = 0; i < g.rows; ++i)
        for (std::size_t j = 0; j < g.cols; ++j) m.set_entry(i, j, g(i, j));
    return m;
}

inline ScalarGrid grid_add(const ScalarGrid& a, const ScalarGrid& b, double c) {
    ScalarGrid out = a;
    for (std::size_t k = 0; k < a.cells.size(); ++k) out.cells[k] = add(a.cells[k], b.cells[k], c);
    return out;
}

inline ScalarGrid grid_mul(const ScalarGrid& a, const ScalarGrid& b) {
    const std::size_t degree = a.cells.front().degree();
    ScalarGrid out{a.rows, b.cols, std::vector<TaylorScalar>(a.rows * b.cols, TaylorScalar(degree))};
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < b.cols; ++j)
            for (std::size_t k = 0; k < a.cols; ++k) out(i, j) = add(out(i, j), mul(a(i, k), b(k, j)));
    return out;
}

inline ScalarGrid grid_transpose(const ScalarGrid& a) {
    ScalarGrid out{a.cols, a.rows, std::vector<TaylorScalar>(a.cells.size())};
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) out(j, i) = a(i, j);
    return out;
}

inline TaylorScalar grid_trace(const ScalarGrid& a) {
    TaylorScalar t(a.cells.front().degree());
    for (std::size_t i = 0; i < a.rows; ++i) t = add(t, a(i, i));
    return t;
}

/// Gauss-Jordan inversion with partial pivoting on leading coefficients,
/// carried out in Taylor-scalar arithmetic.
inline ScalarGrid grid_inverse(ScalarGrid a) {
    const std::size_t n = a.rows;
    const std::size_t degree = a.cells.front().degree();
    ScalarGrid inv{n, n, std::vector<TaylorScalar>(n * n, TaylorScalar(degree))};
    for (std::size_t i = 0; i < n; ++i) inv(i, i) = TaylorScalar::constant(1.0, degree);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k).value()) > std::abs(a(p, k).value())) p = i;
        for (std::size_t j = 0; j < n; ++j) {
            std::swap(a(k, j), a(p, j));
            std::swap(inv(k, j), inv(p, j));
        }
        const TaylorScalar pivot = a(k, k);
        for (std::size_t j = 0; j < n; ++j) {
            a(k, j) = div(a(k, j), pivot);
            inv(k, j) = div(inv(k, j), pivot);
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k) continue;
            const TaylorScalar f = a(i, k);
            for (std::size_t j = 0; j < n; ++j) {
                a(i, j) = add(a(i, j), mul(f, a(k, j)), -1.0);
                inv(i, j) = add(inv(i, j), mul(f, inv(k, j)), -1.0);
            }
        }
    }
    return inv;
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double diag_shift = 0.0) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Matrix m(rows, cols);
    for (double& v : m.data()) v = dist(rng);
    for (std::size_t i = 0; i < std::min(rows, cols); ++i) m(i, i) += diag_shift;
    return m;
}

inline TaylorMatrix random_taylor(std::size_t rows, std::size_t cols, std::size_t degree, std::mt19937_64& rng,
                                  double diag_shift = 0.0) {
    TaylorMatrix m(rows, cols, degree);
    for (std::size_t d = 0; d <= degree; ++d) m[d] = random_matrix(rows, cols, rng, d == 0 ? diag_shift : 0.0);
    return m;
}

inline TaylorScalar random_scalar(std::size_t degree, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    TaylorScalar s(degree);
    for (std::size_t d = 0; d <= degree; ++d) s[d] = dist(rng);
    return s;
}

/// Plain double matrix product, i-j-k loop.
inline Matrix naive_product(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

/// Plain double Gauss-Jordan inverse.
inline Matrix naive_inverse(const Matrix& x) {
    const TaylorMatrix t = TaylorMatrix::constant(x, 0);
    return from_grid(grid_inverse(to_grid(t)), 0)[0];
}

/// d-th derivative of f at x by fourth-order central differences, d in {1, 2, 3}.
inline double central_derivative(const std::function<double(double)>& f, double x, int d) {
    const double s = std::max(1.0, std::abs(x));
    switch (d) {
        case 1: {
            const double h = 1e-3 * s;
            return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
        }
        case 2: {
            const double h = 1e-2 * s;
            return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
        }
        default: {
            const double h = 2e-2 * s;
            return (-f(x + 3 * h) + 8 * f(x + 2 * h) - 13 * f(x + h) + 13 * f(x - h) - 8 * f(x - 2 * h) +
                    f(x - 3 * h)) /
                   (8 * h * h * h);
        }
    }
}

/// Central-difference gradient of a scalar function of a matrix.
inline Matrix fd_gradient(const std::function<double(const Matrix&)>& f, const Matrix& x) {
    const double h = 1e-5 * std::max(1.0, x.max_abs());
    Matrix g(x.rows(), x.cols());
    Matrix xp = x;
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) {
            const double orig = xp(i, j);
            xp(i, j) = orig + h;
            const double fp = f(xp);
            xp(i, j) = orig - h;
            const double fm = f(xp);
            xp(i, j) = orig;
            g(i, j) = (fp - fm) / (2 * h);
        }
    return g;
}

/// max |a - b| / max(1, max |b|).
inline double relative_error(const Matrix& a, const Matrix& b) {
    return max_abs_diff(a, b) / std::max(1.0, b.max_abs());
}

/// <A, B> = sum_ij A_ij * B_ij in Taylor arithmetic (entrywise).
inline TaylorScalar taylor_pairing(const TaylorMatrix& a, const TaylorMatrix& b) {
    TaylorScalar s(a.degree());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s = add(s, mul(a.entry(i, j), b.entry(i, j)));
    return s;
}

/// Central difference of a Taylor-valued function of a step h.
inline TaylorScalar taylor_central_difference(const std::function<TaylorScalar(double)>& along, double h) {
    TaylorScalar diff = add(along(h), along(-h), -1.0);
    for (std::size_t d = 0; d <= diff.degree(); ++d) diff[d] /= 2 * h;
    return diff;
}

}  // namespace utpm::testing
