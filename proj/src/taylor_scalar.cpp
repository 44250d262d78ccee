#include "utpm/taylor_scalar.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "utpm/error.hpp"

namespace utpm {
namespace utps {
namespace {

void require_same_length(std::size_t a, std::size_t b) {
    if (a != b) {
        throw ShapeError("Taylor degree mismatch: " + std::to_string(a - 1) + " vs " +
                         std::to_string(b - 1));
    }
}

// Coefficient d of u*v: sum_{j=0}^{d} u_j v_{d-j}. Costs d+1 muls and d adds.
inline double convolve(std::span<const double> u, std::span<const double> v, std::size_t d) {
    double acc = u[0] * v[d];
#ifdef UTPM_MUTATION_TS_MUL_DROP_TERM
    const std::size_t last = d;  // omits u_d v_0
#else
    const std::size_t last = d + 1;
#endif
    for (std::size_t j = 1; j < last; ++j) acc += u[j] * v[d - j];
    return acc;
}

}  // namespace

void add(std::span<const double> u, std::span<const double> v, double c, std::span<double> out,
         OpMeter* meter) {
    require_same_length(u.size(), v.size());
    require_same_length(u.size(), out.size());
    if (c == 1.0) {
        for (std::size_t d = 0; d < u.size(); ++d) out[d] = u[d] + v[d];
    } else {
        for (std::size_t d = 0; d < u.size(); ++d) out[d] = u[d] + c * v[d];
        if (meter) meter->scalar_mul(u.size());
    }
    if (meter) meter->scalar_add(u.size());
}

void mul(std::span<const double> u, std::span<const double> v, std::span<double> out,
         OpMeter* meter) {
    require_same_length(u.size(), v.size());
    require_same_length(u.size(), out.size());
    const std::size_t n = u.size();
    for (std::size_t d = 0; d < n; ++d) out[d] = convolve(u, v, d);
    if (meter) {
        meter->scalar_mul(n * (n + 1) / 2);
        meter->scalar_add(n * (n - 1) / 2);
    }
}

void mul_accumulate(std::span<const double> u, std::span<const double> v, double scale,
                    std::span<double> out, OpMeter* meter) {
    require_same_length(u.size(), v.size());
    require_same_length(u.size(), out.size());
    const std::size_t n = u.size();
    if (scale == 1.0) {
        for (std::size_t d = 0; d < n; ++d) out[d] += convolve(u, v, d);
    } else {
        for (std::size_t d = 0; d < n; ++d) out[d] += scale * convolve(u, v, d);
        if (meter) meter->scalar_mul(n);
    }
    if (meter) {
        meter->scalar_mul(n * (n + 1) / 2);
        meter->scalar_add(n * (n - 1) / 2 + n);
    }
}

void div(std::span<const double> u, std::span<const double> v, std::span<double> out,
         OpMeter* meter) {
    require_same_length(u.size(), v.size());
    require_same_length(u.size(), out.size());
    if (v[0] == 0.0) throw SingularLeadingCoefficientError("Taylor division by v with v_0 == 0");
    const std::size_t n = u.size();
    for (std::size_t d = 0; d < n; ++d) {
        double acc = u[d];
        for (std::size_t j = 0; j < d; ++j) acc -= out[j] * v[d - j];
        out[d] = acc / v[0];
    }
    if (meter) {
        meter->scalar_mul(n * (n - 1) / 2);
        meter->scalar_add(n * (n - 1) / 2);
        meter->scalar_div(n);
    }
}

void sqrt(std::span<const double> u, std::span<double> out, OpMeter* meter) {
    require_same_length(u.size(), out.size());
    if (!(u[0] > 0.0)) throw DomainError("Taylor sqrt requires a positive leading coefficient");
    const std::size_t n = u.size();
    out[0] = std::sqrt(u[0]);
    const double two_r0 = 2.0 * out[0];
    std::uint64_t muls = 1, adds = 0;
    for (std::size_t d = 1; d < n; ++d) {
        double acc = u[d];
        for (std::size_t j = 1; j < d; ++j) acc -= out[j] * out[d - j];
        out[d] = acc / two_r0;
        muls += d - 1;
        adds += d - 1;
    }
    if (meter) {
        meter->scalar_sqrt();
        meter->scalar_mul(muls);
        meter->scalar_add(adds);
        meter->scalar_div(n - 1);
    }
}

void exp(std::span<const double> u, std::span<double> out) {
    require_same_length(u.size(), out.size());
    out[0] = std::exp(u[0]);
    for (std::size_t d = 1; d < u.size(); ++d) {
        double acc = 0.0;
        for (std::size_t k = 1; k <= d; ++k) acc += static_cast<double>(k) * u[k] * out[d - k];
        out[d] = acc / static_cast<double>(d);
    }
}

void sin_cos(std::span<const double> u, std::span<double> sin_out, std::span<double> cos_out) {
    require_same_length(u.size(), sin_out.size());
    require_same_length(u.size(), cos_out.size());
    sin_out[0] = std::sin(u[0]);
    cos_out[0] = std::cos(u[0]);
    for (std::size_t d = 1; d < u.size(); ++d) {
        double s = 0.0, c = 0.0;
        for (std::size_t k = 1; k <= d; ++k) {
            const double ku = static_cast<double>(k) * u[k];
            s += ku * cos_out[d - k];
            c -= ku * sin_out[d - k];
        }
        sin_out[d] = s / static_cast<double>(d);
        cos_out[d] = c / static_cast<double>(d);
    }
}

}  // namespace utps

TaylorScalar::TaylorScalar(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw InvalidDegreeError("TaylorScalar needs at least one coefficient");
}

TaylorScalar TaylorScalar::truncated(std::size_t degree) const {
    if (degree > this->degree()) throw IndexError("cannot truncate to a higher degree");
    return TaylorScalar(std::vector<double>(coeffs_.begin(), coeffs_.begin() + degree + 1));
}

std::ostream& operator<<(std::ostream& os, const TaylorScalar& s) {
    os << '[';
    for (std::size_t d = 0; d <= s.degree(); ++d) os << (d ? ", " : "") << s[d];
    return os << ']';
}

TaylorScalar lift(double value, double direction, std::size_t degree) {
    if (degree < 1) throw InvalidDegreeError("lift requires degree >= 1");
    TaylorScalar s(degree);
    s[0] = value;
    s[1] = direction;
    return s;
}

TaylorScalar add(const TaylorScalar& u, const TaylorScalar& v, double c, OpMeter* meter) {
    TaylorScalar out(u.degree());
    utps::add(u.coeffs(), v.coeffs(), c, out.coeffs(), meter);
    return out;
}

TaylorScalar mul(const TaylorScalar& u, const TaylorScalar& v, OpMeter* meter) {
    TaylorScalar out(u.degree());
    utps::mul(u.coeffs(), v.coeffs(), out.coeffs(), meter);
    return out;
}

TaylorScalar div(const TaylorScalar& u, const TaylorScalar& v, OpMeter* meter) {
    TaylorScalar out(u.degree());
    utps::div(u.coeffs(), v.coeffs(), out.coeffs(), meter);
    return out;
}

TaylorScalar exp(const TaylorScalar& u) {
    TaylorScalar out(u.degree());
    utps::exp(u.coeffs(), out.coeffs());
    return out;
}

std::pair<TaylorScalar, TaylorScalar> sin_cos(const TaylorScalar& u) {
    std::pair<TaylorScalar, TaylorScalar> out{TaylorScalar(u.degree()), TaylorScalar(u.degree())};
    utps::sin_cos(u.coeffs(), out.first.coeffs(), out.second.coeffs());
    return out;
}

TaylorScalar sqrt(const TaylorScalar& u, OpMeter* meter) {
    TaylorScalar out(u.degree());
    utps::sqrt(u.coeffs(), out.coeffs(), meter);
    return out;
}

double derivative(const TaylorScalar& u, std::size_t d) {
    if (d > u.degree()) {
        throw IndexError("derivative order " + std::to_string(d) + " exceeds degree " +
                         std::to_string(u.degree()));
    }
    double factorial = 1.0;
    for (std::size_t k = 2; k <= d; ++k) factorial *= static_cast<double>(k);
    return factorial * u[d];
}

}  // namespace utpm
