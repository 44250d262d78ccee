#include "utpm/taylor_matrix.hpp"

#include <algorithm>
#include <string>

#include "utpm/error.hpp"
#include "utpm/kernels.hpp"

namespace utpm {
namespace {

std::string shape_str(const TaylorMatrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + " (degree " +
           std::to_string(m.degree()) + ")";
}

void require_same_degree(const TaylorMatrix& a, const TaylorMatrix& b, const char* op) {
    if (a.degree() != b.degree()) {
        throw ShapeError(std::string(op) + ": degree mismatch " + shape_str(a) + " vs " + shape_str(b));
    }
}

}  // namespace

TaylorMatrix::TaylorMatrix(std::vector<Matrix> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw InvalidDegreeError("TaylorMatrix needs at least one coefficient");
    rows_ = coeffs_.front().rows();
    cols_ = coeffs_.front().cols();
    for (const Matrix& c : coeffs_) {
        if (c.rows() != rows_ || c.cols() != cols_) throw ShapeError("TaylorMatrix coefficients differ in shape");
    }
}

TaylorMatrix TaylorMatrix::constant(const Matrix& x0, std::size_t degree) {
    TaylorMatrix m(x0.rows(), x0.cols(), degree);
    m[0] = x0;
    return m;
}

TaylorMatrix TaylorMatrix::lift(const Matrix& x0, const Matrix& direction, std::size_t degree) {
    if (degree < 1) throw InvalidDegreeError("lift requires degree >= 1");
    if (x0.rows() != direction.rows() || x0.cols() != direction.cols()) {
        throw ShapeError("lift: direction shape differs from base point");
    }
    TaylorMatrix m = constant(x0, degree);
    m[1] = direction;
    return m;
}

TaylorMatrix TaylorMatrix::from_scalar(const TaylorScalar& s) {
    TaylorMatrix m(1, 1, s.degree());
    for (std::size_t d = 0; d <= s.degree(); ++d) m[d](0, 0) = s[d];
    return m;
}

TaylorScalar TaylorMatrix::entry(std::size_t i, std::size_t j) const {
    if (i >= rows_ || j >= cols_) throw IndexError("TaylorMatrix entry out of range");
    TaylorScalar s(degree());
    for (std::size_t d = 0; d <= degree(); ++d) s[d] = coeffs_[d](i, j);
    return s;
}

void TaylorMatrix::set_entry(std::size_t i, std::size_t j, const TaylorScalar& s) {
    if (i >= rows_ || j >= cols_) throw IndexError("TaylorMatrix entry out of range");
    if (s.degree() != degree()) throw ShapeError("set_entry: degree mismatch");
    for (std::size_t d = 0; d <= degree(); ++d) coeffs_[d](i, j) = s[d];
}

TaylorScalar TaylorMatrix::to_scalar() const {
    if (rows_ != 1 || cols_ != 1) throw ShapeError("to_scalar: matrix is " + shape_str(*this));
    return entry(0, 0);
}

TaylorMatrix TaylorMatrix::truncated(std::size_t degree) const {
    if (degree > this->degree()) throw IndexError("cannot truncate to a higher degree");
    return TaylorMatrix(std::vector<Matrix>(coeffs_.begin(), coeffs_.begin() + degree + 1));
}

std::ostream& operator<<(std::ostream& os, const TaylorMatrix& m) {
    os << '{';
    for (std::size_t d = 0; d <= m.degree(); ++d) os << (d ? ", " : "") << m[d];
    return os << '}';
}

double max_abs_diff(const TaylorMatrix& a, const TaylorMatrix& b) {
    if (!a.same_shape(b)) throw ShapeError("max_abs_diff: " + shape_str(a) + " vs " + shape_str(b));
    double m = 0.0;
    for (std::size_t d = 0; d <= a.degree(); ++d) m = std::max(m, max_abs_diff(a[d], b[d]));
    return m;
}

TaylorMatrix add(const TaylorMatrix& a, const TaylorMatrix& b, double c, OpMeter* meter) {
    if (!a.same_shape(b)) throw ShapeError("add: " + shape_str(a) + " vs " + shape_str(b));
    TaylorMatrix out = a;
    for (std::size_t d = 0; d <= a.degree(); ++d) kernels::axpy(c, b[d], out[d]);
    if (meter) meter->matrix_add(a.degree() + 1);
    return out;
}

TaylorMatrix mul(const TaylorMatrix& a, const TaylorMatrix& b, OpMeter* meter) {
    require_same_degree(a, b, "mul");
    if (a.cols() != b.rows()) throw ShapeError("mul: inner dimension " + shape_str(a) + " vs " + shape_str(b));
    TaylorMatrix out(a.rows(), b.cols(), a.degree());
    for (std::size_t d = 0; d <= a.degree(); ++d) {
        kernels::gemm(a[0], b[d], out[d]);
        for (std::size_t e = 1; e <= d; ++e) kernels::gemm(a[e], b[d - e], out[d], true);
        if (meter) {
            meter->matrix_mul(d + 1);
            meter->matrix_add(d);
        }
    }
    return out;
}

void mul_accumulate(const TaylorMatrix& a, const TaylorMatrix& b, double scale, TaylorMatrix& acc,
                    OpMeter* meter) {
    require_same_degree(a, b, "mul_accumulate");
    require_same_degree(a, acc, "mul_accumulate");
    if (a.cols() != b.rows() || acc.rows() != a.rows() || acc.cols() != b.cols()) {
        throw ShapeError("mul_accumulate: " + shape_str(a) + " * " + shape_str(b) + " into " +
                         shape_str(acc));
    }
    if (scale == 1.0) {
        for (std::size_t d = 0; d <= a.degree(); ++d)
            for (std::size_t e = 0; e <= d; ++e) kernels::gemm(a[e], b[d - e], acc[d], true);
    } else {
        Matrix tmp(acc.rows(), acc.cols());
        for (std::size_t d = 0; d <= a.degree(); ++d) {
            kernels::gemm(a[0], b[d], tmp);
            for (std::size_t e = 1; e <= d; ++e) kernels::gemm(a[e], b[d - e], tmp, true);
            kernels::axpy(scale, tmp, acc[d]);
        }
    }
    if (meter) {
        const std::size_t n = a.degree() + 1;
        meter->matrix_mul(n * (n + 1) / 2);
        meter->matrix_add(n * (n + 1) / 2);
    }
}

TaylorMatrix transpose(const TaylorMatrix& a) {
    std::vector<Matrix> coeffs;
    coeffs.reserve(a.degree() + 1);
    for (const Matrix& c : a.coeffs()) coeffs.push_back(c.transposed());
    return TaylorMatrix(std::move(coeffs));
}

TaylorScalar trace(const TaylorMatrix& a) {
    if (!a.is_square()) throw ShapeError("trace of non-square " + shape_str(a));
    TaylorScalar s(a.degree());
    for (std::size_t d = 0; d <= a.degree(); ++d) s[d] = a[d].trace();
    return s;
}

TaylorMatrix inv(const TaylorMatrix& x, OpMeter* meter) {
    if (!x.is_square()) throw ShapeError("inv of non-square " + shape_str(x));
    const std::size_t n = x.rows();
    const kernels::LuFactorization lu(x[0], meter);
    if (meter) meter->base_inverse();

    TaylorMatrix y(n, n, x.degree());
    y[0] = lu.inverse(meter);
    Matrix rhs(n, n);
    for (std::size_t d = 1; d <= x.degree(); ++d) {
        kernels::gemm(x[1], y[d - 1], rhs);
        for (std::size_t e = 2; e <= d; ++e) kernels::gemm(x[e], y[d - e], rhs, true);
        // Applying the stored factors stands in for one product with X_0^{-1}.
        y[d] = lu.solve(rhs);
        y[d] *= -1.0;
        if (meter) {
            meter->matrix_mul(d + 1);
            meter->matrix_add(d - 1);
        }
    }
    return y;
}

}  // namespace utpm
