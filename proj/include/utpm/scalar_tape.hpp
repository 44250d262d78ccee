#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "utpm/matrix.hpp"
#include "utpm/op_meter.hpp"
#include "utpm/taylor_matrix.hpp"
#include "utpm/taylor_scalar.hpp"

namespace utpm {

enum class ScalarOp { input, constant, add, mul, div, sqrt, neg };

struct ScalarTapeEntry {
    ScalarOp op = ScalarOp::input;
    std::array<std::size_t, 2> args{0, 0};
    double add_scale = 1.0;
};

class ScalarTape;

/// Handle to a recorded Taylor scalar. Arithmetic on handles records onto
/// the owning tape, which evaluates eagerly.
struct TapedScalar {
    ScalarTape* tape = nullptr;
    std::size_t id = 0;

    double value() const;  // leading coefficient
};

/// Operation-overloading tape of Taylor-scalar elementary operations.
///
/// Every intermediate value is stored, densely, in one coefficient array of
/// length entry_count * (degree + 1). This is the memory that matrix-level
/// differentiation avoids.
class ScalarTape {
public:
    explicit ScalarTape(std::size_t degree, OpMeter* meter = nullptr) : degree_(degree), meter_(meter) {}

    std::size_t degree() const noexcept { return degree_; }

    TapedScalar input(const TaylorScalar& value);
    TapedScalar constant(double value);
    /// a + scale*b
    TapedScalar add(TapedScalar a, TapedScalar b, double scale = 1.0);
    TapedScalar mul(TapedScalar a, TapedScalar b);
    TapedScalar div(TapedScalar a, TapedScalar b);
    TapedScalar sqrt(TapedScalar a);
    TapedScalar neg(TapedScalar a);

    void mark_output(TapedScalar s);

    std::span<const double> value(std::size_t id) const {
        return {values_.data() + id * stride(), stride()};
    }
    TaylorScalar taylor_value(std::size_t id) const;

    const std::vector<ScalarTapeEntry>& entries() const noexcept { return entries_; }
    const std::vector<std::size_t>& inputs() const noexcept { return inputs_; }
    const std::vector<std::size_t>& outputs() const noexcept { return outputs_; }
    std::size_t entry_count() const noexcept { return entries_.size(); }
    std::size_t peak_memory_coeffs() const noexcept { return values_.size(); }
    OpMeter* meter() const noexcept { return meter_; }

private:
    std::size_t stride() const noexcept { return degree_ + 1; }
    std::size_t push(ScalarOp op, std::size_t a, std::size_t b, double scale);
    std::span<double> slot(std::size_t id) { return {values_.data() + id * stride(), stride()}; }
    void check_handle(TapedScalar s) const;

    std::size_t degree_;
    OpMeter* meter_;
    std::vector<ScalarTapeEntry> entries_;
    std::vector<double> values_;
    std::vector<std::size_t> inputs_;
    std::vector<std::size_t> outputs_;
};

inline TapedScalar operator+(TapedScalar a, TapedScalar b) { return a.tape->add(a, b); }
inline TapedScalar operator-(TapedScalar a, TapedScalar b) { return a.tape->add(a, b, -1.0); }
inline TapedScalar operator*(TapedScalar a, TapedScalar b) { return a.tape->mul(a, b); }
inline TapedScalar operator/(TapedScalar a, TapedScalar b) { return a.tape->div(a, b); }
inline TapedScalar operator-(TapedScalar a) { return a.tape->neg(a); }
inline TapedScalar sqrt(TapedScalar a) { return a.tape->sqrt(a); }

/// Taylor-valued adjoints of the tape inputs, in registration order, for
/// one seed per output. Throws UsageError on a seed count mismatch.
std::vector<TaylorScalar> scalar_reverse_sweep(const ScalarTape& tape, std::span<const TaylorScalar> seeds);

struct GivensRotation {
    TapedScalar c;
    TapedScalar s;
    TapedScalar r;
    bool identity = false;  // a_0 == b_0 == 0: no rotation recorded
};

/// Plane rotation with r = sqrt(a^2 + b^2), c = a/r, s = b/r.
GivensRotation givens(TapedScalar a, TapedScalar b);

/// Upper-triangular R and explicitly accumulated Q^T with Q^T X = R, both
/// n x n row-major.
struct QrFactors {
    std::vector<TapedScalar> r;
    std::vector<TapedScalar> qt;
};

/// Givens QR of a row-major n x n matrix of taped scalars.
QrFactors qr_factor(std::span<const TapedScalar> x, std::size_t n);

/// X^{-1} by Givens QR then back substitution of R Y = Q^T, every scalar
/// operation taped. Throws SingularMatrixError when some |R_kk| leading
/// coefficient is <= 1e-12 * max|X|.
std::vector<TapedScalar> qr_inverse(std::span<const TapedScalar> x, std::size_t n);

struct UtpsGradient {
    TaylorMatrix gradient;  // Taylor adjoint of every entry of X
    std::size_t entry_count = 0;
    std::size_t peak_memory_coeffs = 0;
};

/// Taylor adjoint of f(X) = tr(X^{-1}) by taping the Givens-QR inverse on
/// Taylor scalars and sweeping the scalar tape with seed [1, 0, ..., 0].
UtpsGradient utps_gradient_tr_inv(const TaylorMatrix& x, OpMeter* meter = nullptr);
UtpsGradient utps_gradient_tr_inv(const Matrix& x0, std::size_t degree, OpMeter* meter = nullptr);

}  // namespace utpm
