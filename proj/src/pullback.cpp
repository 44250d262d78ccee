#include "utpm/pullback.hpp"

#include "utpm/error.hpp"
#include "utpm/kernels.hpp"

namespace utpm::pullback {
namespace {

void require_adjoint_shape(const TaylorMatrix& adjoint, std::size_t rows, std::size_t cols,
                           std::size_t degree, const char* op) {
    if (adjoint.rows() != rows || adjoint.cols() != cols || adjoint.degree() != degree) {
        throw ShapeError(std::string("pullback ") + op + ": accumulator shape mismatch");
    }
}

}  // namespace

void mul(const TaylorMatrix& zbar, const TaylorMatrix& x, const TaylorMatrix& y, TaylorMatrix& xbar,
         TaylorMatrix& ybar, OpMeter* meter) {
    if (x.cols() != y.rows()) throw ShapeError("pullback mul: inner dimension mismatch");
    require_adjoint_shape(zbar, x.rows(), y.cols(), x.degree(), "mul");
    require_adjoint_shape(xbar, x.rows(), x.cols(), x.degree(), "mul");
    require_adjoint_shape(ybar, y.rows(), y.cols(), y.degree(), "mul");
#ifdef UTPM_MUTATION_PB_MUL_NO_TRANSPOSE
    mul_accumulate(zbar, y, 1.0, xbar, meter);
    mul_accumulate(x, zbar, 1.0, ybar, meter);
#else
    mul_accumulate(zbar, utpm::transpose(y), 1.0, xbar, meter);
    mul_accumulate(utpm::transpose(x), zbar, 1.0, ybar, meter);
#endif
}

void inv(const TaylorMatrix& ybar, const TaylorMatrix& y, TaylorMatrix& xbar, OpMeter* meter) {
    if (!y.is_square()) throw ShapeError("pullback inv: result is not square");
    require_adjoint_shape(ybar, y.rows(), y.cols(), y.degree(), "inv");
    require_adjoint_shape(xbar, y.rows(), y.cols(), y.degree(), "inv");
    const TaylorMatrix yt = utpm::transpose(y);
#ifdef UTPM_MUTATION_PB_INV_SIGN
    constexpr double sign = 1.0;
#else
    constexpr double sign = -1.0;
#endif
    mul_accumulate(utpm::mul(yt, ybar, meter), yt, sign, xbar, meter);
}

void transpose(const TaylorMatrix& ybar, TaylorMatrix& xbar) {
    require_adjoint_shape(xbar, ybar.cols(), ybar.rows(), ybar.degree(), "transpose");
    for (std::size_t d = 0; d <= ybar.degree(); ++d) {
        for (std::size_t i = 0; i < ybar.rows(); ++i)
            for (std::size_t j = 0; j < ybar.cols(); ++j) xbar[d](j, i) += ybar[d](i, j);
    }
}

void trace(const TaylorScalar& ybar, std::size_t n, TaylorMatrix& xbar) {
    require_adjoint_shape(xbar, n, n, ybar.degree(), "trace");
    for (std::size_t d = 0; d <= ybar.degree(); ++d)
        for (std::size_t i = 0; i < n; ++i) xbar[d](i, i) += ybar[d];
}

void add(const TaylorMatrix& zbar, double c, TaylorMatrix& abar, TaylorMatrix& bbar, OpMeter* meter) {
    require_adjoint_shape(abar, zbar.rows(), zbar.cols(), zbar.degree(), "add");
    require_adjoint_shape(bbar, zbar.rows(), zbar.cols(), zbar.degree(), "add");
    for (std::size_t d = 0; d <= zbar.degree(); ++d) {
        kernels::axpy(1.0, zbar[d], abar[d]);
        kernels::axpy(c, zbar[d], bbar[d]);
    }
    if (meter) meter->matrix_add(2 * (zbar.degree() + 1));
}

}  // namespace utpm::pullback
