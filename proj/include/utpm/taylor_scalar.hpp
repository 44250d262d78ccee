#pragma once

#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "utpm/op_meter.hpp"

namespace utpm {

/// Truncated-Taylor kernels on raw coefficient spans (lowest degree first).
///
/// All spans passed to one call must have equal length D+1. Unless stated
/// otherwise `out` must not alias an input. The optional meter receives one
/// event per real operation performed.
namespace utps {

/// out = u + c*v. `out` may alias `u` or `v`.
void add(std::span<const double> u, std::span<const double> v, double c, std::span<double> out,
         OpMeter* meter = nullptr);
/// out = u * v (truncated Cauchy convolution).
void mul(std::span<const double> u, std::span<const double> v, std::span<double> out,
         OpMeter* meter = nullptr);
/// out += scale * (u * v).
void mul_accumulate(std::span<const double> u, std::span<const double> v, double scale,
                    std::span<double> out, OpMeter* meter = nullptr);
/// out = u / v. Requires v[0] != 0.
void div(std::span<const double> u, std::span<const double> v, std::span<double> out,
         OpMeter* meter = nullptr);
/// out = sqrt(u). Requires u[0] > 0.
void sqrt(std::span<const double> u, std::span<double> out, OpMeter* meter = nullptr);
void exp(std::span<const double> u, std::span<double> out);
void sin_cos(std::span<const double> u, std::span<double> sin_out, std::span<double> cos_out);

}  // namespace utps

/// Degree-D truncated univariate Taylor polynomial x_0 + x_1 t + ... + x_D t^D.
///
/// The degree is fixed at construction. Binary operations between values of
/// different degree throw ShapeError rather than silently truncating.
class TaylorScalar {
public:
    /// Zero polynomial of the given degree.
    explicit TaylorScalar(std::size_t degree = 0) : coeffs_(degree + 1, 0.0) {}
    explicit TaylorScalar(std::vector<double> coeffs);
    TaylorScalar(std::initializer_list<double> coeffs) : TaylorScalar(std::vector<double>(coeffs)) {}

    static TaylorScalar constant(double value, std::size_t degree) {
        TaylorScalar s(degree);
        s.coeffs_[0] = value;
        return s;
    }

    std::size_t degree() const noexcept { return coeffs_.size() - 1; }
    double operator[](std::size_t d) const { return coeffs_[d]; }
    double& operator[](std::size_t d) { return coeffs_[d]; }
    double value() const noexcept { return coeffs_[0]; }

    std::span<const double> coeffs() const noexcept { return coeffs_; }
    std::span<double> coeffs() noexcept { return coeffs_; }

    /// Drops coefficients above `degree`.
    TaylorScalar truncated(std::size_t degree) const;

    friend bool operator==(const TaylorScalar&, const TaylorScalar&) = default;

private:
    std::vector<double> coeffs_;
};

std::ostream& operator<<(std::ostream& os, const TaylorScalar& s);

/// [value, direction, 0, ..., 0]. Throws InvalidDegreeError for degree < 1.
TaylorScalar lift(double value, double direction, std::size_t degree);

/// u + c*v.
TaylorScalar add(const TaylorScalar& u, const TaylorScalar& v, double c = 1.0,
                 OpMeter* meter = nullptr);
TaylorScalar mul(const TaylorScalar& u, const TaylorScalar& v, OpMeter* meter = nullptr);
/// Throws SingularLeadingCoefficientError when v_0 == 0.
TaylorScalar div(const TaylorScalar& u, const TaylorScalar& v, OpMeter* meter = nullptr);
TaylorScalar exp(const TaylorScalar& u);
/// Returns (sin u, cos u).
std::pair<TaylorScalar, TaylorScalar> sin_cos(const TaylorScalar& u);
/// Throws DomainError when u_0 <= 0.
TaylorScalar sqrt(const TaylorScalar& u, OpMeter* meter = nullptr);

/// d-th directional derivative d! * u_d. Throws IndexError if d > degree.
double derivative(const TaylorScalar& u, std::size_t d);

inline TaylorScalar operator+(const TaylorScalar& u, const TaylorScalar& v) { return add(u, v, 1.0); }
inline TaylorScalar operator-(const TaylorScalar& u, const TaylorScalar& v) { return add(u, v, -1.0); }
inline TaylorScalar operator*(const TaylorScalar& u, const TaylorScalar& v) { return mul(u, v); }
inline TaylorScalar operator/(const TaylorScalar& u, const TaylorScalar& v) { return div(u, v); }
inline TaylorScalar operator-(const TaylorScalar& u) { return add(TaylorScalar(u.degree()), u, -1.0); }

}  // namespace utpm
