#include "utpm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "utpm/error.hpp"

namespace utpm::kernels {
namespace {

void check_gemm_shapes(const Matrix& a, const Matrix& b, const Matrix& c) {
    if (a.cols() != b.rows() || c.rows() != a.rows() || c.cols() != b.cols()) {
        throw ShapeError("gemm: cannot multiply " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " by " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()) + " into " + std::to_string(c.rows()) + "x" +
                         std::to_string(c.cols()));
    }
}

// Forward then backward substitution on one right-hand side, in place.
void substitute(const Matrix& lu, std::span<double> x) {
    const std::size_t n = lu.rows();
    for (std::size_t i = 0; i < n; ++i) {
        double acc = x[i];
        for (std::size_t k = 0; k < i; ++k) acc -= lu(i, k) * x[k];
        x[i] = acc;
    }
    for (std::size_t i = n; i-- > 0;) {
        double acc = x[i];
        for (std::size_t k = i + 1; k < n; ++k) acc -= lu(i, k) * x[k];
        x[i] = acc / lu(i, i);
    }
}

}  // namespace

void gemm(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate) {
    check_gemm_shapes(a, b, c);
    const std::size_t m = a.rows(), inner = a.cols(), n = b.cols();
    const bool parallel = m * inner * n >= kParallelWorkThreshold;
    const double* pa = a.data().data();
    const double* pb = b.data().data();
    double* pc = c.data().data();
#pragma omp parallel for schedule(static) if (parallel)
    for (std::ptrdiff_t si = 0; si < static_cast<std::ptrdiff_t>(m); ++si) {
        const auto i = static_cast<std::size_t>(si);
        double* ci = pc + i * n;
        if (!accumulate) std::fill(ci, ci + n, 0.0);
        for (std::size_t k = 0; k < inner; ++k) {
            const double aik = pa[i * inner + k];
            const double* bk = pb + k * n;
            for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
        }
    }
}

void axpy(double alpha, const Matrix& x, Matrix& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) throw ShapeError("axpy: shape mismatch");
    auto xs = x.data();
    auto ys = y.data();
    const bool parallel = xs.size() >= kParallelWorkThreshold;
#pragma omp parallel for schedule(static) if (parallel)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(xs.size()); ++k) ys[k] += alpha * xs[k];
}

LuFactorization::LuFactorization(const Matrix& a, OpMeter* meter) : lu_(a), perm_(a.rows()) {
    if (!a.is_square()) throw ShapeError("LU factorization of a non-square matrix");
    const std::size_t n = a.rows();
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    const double scale = a.max_abs();
    double min_pivot = n ? std::numeric_limits<double>::infinity() : 0.0;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(lu_(i, k)) > std::abs(lu_(p, k))) p = i;
        const double pivot = std::abs(lu_(p, k));
        min_pivot = std::min(min_pivot, pivot);
        if (scale == 0.0 || pivot <= kPivotTolerance * scale) {
            throw SingularMatrixError("matrix is singular to working precision (pivot " +
                                          std::to_string(k) + ")",
                                      scale == 0.0 ? 0.0 : pivot / scale);
        }
        if (p != k) {
            std::swap_ranges(lu_.row(k).begin(), lu_.row(k).end(), lu_.row(p).begin());
            std::swap(perm_[k], perm_[p]);
        }
        const double inv_pivot = 1.0 / lu_(k, k);
        const std::size_t trailing = n - k - 1;
        const bool parallel = trailing * trailing * 8 >= kParallelWorkThreshold;
#pragma omp parallel for schedule(static) if (parallel)
        for (std::ptrdiff_t si = static_cast<std::ptrdiff_t>(k + 1); si < static_cast<std::ptrdiff_t>(n); ++si) {
            const auto i = static_cast<std::size_t>(si);
            const double f = lu_(i, k) * inv_pivot;
            lu_(i, k) = f;
            for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
        }
        if (meter) {
            meter->scalar_div(1);
            meter->scalar_mul(trailing + trailing * trailing);
            meter->scalar_add(trailing * trailing);
        }
    }
    pivot_ratio_ = scale == 0.0 ? 0.0 : min_pivot / scale;
}

Matrix LuFactorization::solve(const Matrix& b, OpMeter* meter) const {
    const std::size_t n = size();
    if (b.rows() != n) throw ShapeError("LU solve: right-hand side has wrong row count");
    const std::size_t cols = b.cols();
    Matrix x(n, cols);
    const bool parallel = n * n * cols >= kParallelWorkThreshold;
#pragma omp parallel if (parallel)
    {
        std::vector<double> column(n);
#pragma omp for schedule(static)
        for (std::ptrdiff_t sc = 0; sc < static_cast<std::ptrdiff_t>(cols); ++sc) {
            const auto c = static_cast<std::size_t>(sc);
            for (std::size_t i = 0; i < n; ++i) column[i] = b(perm_[i], c);
            substitute(lu_, column);
            for (std::size_t i = 0; i < n; ++i) x(i, c) = column[i];
        }
    }
    if (meter) {
        meter->scalar_mul(cols * n * (n - 1));
        meter->scalar_add(cols * n * (n - 1));
        meter->scalar_div(cols * n);
    }
    return x;
}

namespace reference {

void gemm(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate) {
    check_gemm_shapes(a, b, c);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = accumulate ? c(i, j) : 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
            c(i, j) = acc;
        }
    }
}

Matrix lu_solve(const Matrix& a, const Matrix& b) {
    const LuFactorization lu(a);
    Matrix x(b.rows(), b.cols());
    // Column-by-column without any threading.
    for (std::size_t c = 0; c < b.cols(); ++c) {
        Matrix col(b.rows(), 1);
        for (std::size_t i = 0; i < b.rows(); ++i) col(i, 0) = b(i, c);
        const Matrix xc = lu.solve(col);
        for (std::size_t i = 0; i < b.rows(); ++i) x(i, c) = xc(i, 0);
    }
    return x;
}

}  // namespace reference
}  // namespace utpm::kernels
