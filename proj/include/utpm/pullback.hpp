#pragma once

#include <cstddef>

#include "utpm/op_meter.hpp"
#include "utpm/taylor_matrix.hpp"

// Reverse-mode rules for matrix operations with Taylor-valued adjoints.
//
// Each rule maps the adjoint of an operation's result onto its arguments
// through the trace pairing tr(Ybar^T dY) = tr(Xbar^T dX). Accumulators
// start at zero and only ever receive "+=" contributions.
namespace utpm::pullback {

/// Z = X*Y:  Xbar += Zbar Y^T,  Ybar += X^T Zbar.
void mul(const TaylorMatrix& zbar, const TaylorMatrix& x, const TaylorMatrix& y, TaylorMatrix& xbar,
         TaylorMatrix& ybar, OpMeter* meter = nullptr);

/// Y = X^{-1}:  Xbar += -Y^T Ybar Y^T.
void inv(const TaylorMatrix& ybar, const TaylorMatrix& y, TaylorMatrix& xbar, OpMeter* meter = nullptr);

/// Y = X^T:  Xbar += Ybar^T.
void transpose(const TaylorMatrix& ybar, TaylorMatrix& xbar);

/// y = tr(X) with X n x n:  Xbar += ybar * I.
void trace(const TaylorScalar& ybar, std::size_t n, TaylorMatrix& xbar);

/// Z = A + c*B:  Abar += Zbar,  Bbar += c Zbar.
void add(const TaylorMatrix& zbar, double c, TaylorMatrix& abar, TaylorMatrix& bbar,
         OpMeter* meter = nullptr);

}  // namespace utpm::pullback
