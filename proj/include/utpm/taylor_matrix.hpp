#pragma once

#include <cstddef>
#include <ostream>
#include <vector>

#include "utpm/matrix.hpp"
#include "utpm/op_meter.hpp"
#include "utpm/taylor_scalar.hpp"

namespace utpm {

/// Truncated Taylor polynomial whose coefficients are matrices,
/// [X] = X_0 + X_1 t + ... + X_D t^D, all X_d of one shape.
///
/// Equivalent to a matrix of TaylorScalars; the coefficient-major layout
/// lets every propagation rule work on whole matrices per degree.
class TaylorMatrix {
public:
    TaylorMatrix() : TaylorMatrix(0, 0, 0) {}
    /// Zero polynomial.
    TaylorMatrix(std::size_t rows, std::size_t cols, std::size_t degree)
        : rows_(rows), cols_(cols), coeffs_(degree + 1, Matrix(rows, cols)) {}
    /// Throws ShapeError if the coefficients disagree in shape or the list is empty.
    explicit TaylorMatrix(std::vector<Matrix> coeffs);

    /// [X0, 0, ..., 0].
    static TaylorMatrix constant(const Matrix& x0, std::size_t degree);
    /// [X0, V, 0, ..., 0]; degree must be >= 1.
    static TaylorMatrix lift(const Matrix& x0, const Matrix& direction, std::size_t degree);
    static TaylorMatrix identity(std::size_t n, std::size_t degree) {
        return constant(Matrix::identity(n), degree);
    }
    /// 1x1 embedding of a Taylor scalar.
    static TaylorMatrix from_scalar(const TaylorScalar& s);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t degree() const noexcept { return coeffs_.size() - 1; }
    bool is_square() const noexcept { return rows_ == cols_; }
    bool same_shape(const TaylorMatrix& o) const noexcept {
        return rows_ == o.rows_ && cols_ == o.cols_ && degree() == o.degree();
    }

    const Matrix& operator[](std::size_t d) const { return coeffs_[d]; }
    Matrix& operator[](std::size_t d) { return coeffs_[d]; }
    const std::vector<Matrix>& coeffs() const noexcept { return coeffs_; }

    /// Taylor scalar held at entry (i, j).
    TaylorScalar entry(std::size_t i, std::size_t j) const;
    void set_entry(std::size_t i, std::size_t j, const TaylorScalar& s);
    /// Inverse of from_scalar; throws ShapeError unless 1x1.
    TaylorScalar to_scalar() const;

    TaylorMatrix truncated(std::size_t degree) const;
    /// Number of stored reals, rows*cols*(degree+1).
    std::size_t storage() const noexcept { return rows_ * cols_ * coeffs_.size(); }

    friend bool operator==(const TaylorMatrix&, const TaylorMatrix&) = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<Matrix> coeffs_;
};

std::ostream& operator<<(std::ostream& os, const TaylorMatrix& m);

/// max over coefficients and entries of |A - B|.
double max_abs_diff(const TaylorMatrix& a, const TaylorMatrix& b);

/// A + c*B.
TaylorMatrix add(const TaylorMatrix& a, const TaylorMatrix& b, double c = 1.0, OpMeter* meter = nullptr);
/// Coefficient d is sum_{e=0}^{d} A_e B_{d-e}.
TaylorMatrix mul(const TaylorMatrix& a, const TaylorMatrix& b, OpMeter* meter = nullptr);
TaylorMatrix transpose(const TaylorMatrix& a);
TaylorScalar trace(const TaylorMatrix& a);

/// Taylor matrix inverse by the coefficient recursion
/// Y_0 = X_0^{-1}, Y_d = -X_0^{-1} sum_{e=1}^{d} X_e Y_{d-e}.
///
/// X_0 is factored once (LU, partial pivoting) and the factors are reused
/// for every degree. Throws SingularMatrixError if X_0 fails the pivot test.
TaylorMatrix inv(const TaylorMatrix& x, OpMeter* meter = nullptr);

/// acc += A*B as Taylor polynomials (truncated), with the product scaled by `scale`.
void mul_accumulate(const TaylorMatrix& a, const TaylorMatrix& b, double scale, TaylorMatrix& acc,
                    OpMeter* meter = nullptr);

}  // namespace utpm
