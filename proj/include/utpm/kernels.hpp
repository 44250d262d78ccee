#pragma once

#include <cstddef>

#include "utpm/matrix.hpp"
#include "utpm/op_meter.hpp"

namespace utpm::kernels {

/// Work (rows * inner * cols) below which the OpenMP kernels stay serial.
inline constexpr std::size_t kParallelWorkThreshold = 32 * 32 * 32;

/// C = A*B, or C += A*B when `accumulate` is set. C must already have the
/// result shape. Rows of C are distributed across OpenMP threads; every
/// entry is summed in ascending inner index, so results match the serial
/// reference exactly.
void gemm(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate = false);

/// Y += alpha*X.
void axpy(double alpha, const Matrix& x, Matrix& y);

/// Dense LU factorization with partial pivoting, P*A = L*U.
class LuFactorization {
public:
    /// Relative pivot threshold of the regularity test.
    static constexpr double kPivotTolerance = 1e-12;

    /// Throws SingularMatrixError when some |pivot| <= kPivotTolerance * max|A|.
    explicit LuFactorization(const Matrix& a, OpMeter* meter = nullptr);

    std::size_t size() const noexcept { return lu_.rows(); }

    /// Solves A*X = B for every column of B (columns run in parallel).
    Matrix solve(const Matrix& b, OpMeter* meter = nullptr) const;
    Matrix inverse(OpMeter* meter = nullptr) const { return solve(Matrix::identity(size()), meter); }

    /// min|pivot| / max|A|.
    double pivot_ratio() const noexcept { return pivot_ratio_; }

private:
    Matrix lu_;
    std::vector<std::size_t> perm_;
    double pivot_ratio_ = 0.0;
};

/// Serial reference kernels. Kept for testing and benchmarking the
/// parallel versions; not used on production paths.
namespace reference {

void gemm(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate = false);
Matrix lu_solve(const Matrix& a, const Matrix& b);

}  // namespace reference

}  // namespace utpm::kernels
