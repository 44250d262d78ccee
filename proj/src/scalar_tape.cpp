#include "utpm/scalar_tape.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "utpm/error.hpp"

namespace utpm {

double TapedScalar::value() const { return tape->value(id)[0]; }

void ScalarTape::check_handle(TapedScalar s) const {
    if (s.tape != this || s.id >= entries_.size()) throw UsageError("taped scalar does not belong to this tape");
}

std::size_t ScalarTape::push(ScalarOp op, std::size_t a, std::size_t b, double scale) {
    const std::size_t id = entries_.size();
    entries_.push_back(ScalarTapeEntry{op, {a, b}, scale});
    values_.resize(values_.size() + stride(), 0.0);
    return id;
}

TapedScalar ScalarTape::input(const TaylorScalar& value) {
    if (value.degree() != degree_) throw ShapeError("tape input degree mismatch");
    const std::size_t id = push(ScalarOp::input, 0, 0, 1.0);
    std::copy(value.coeffs().begin(), value.coeffs().end(), slot(id).begin());
    inputs_.push_back(id);
    return {this, id};
}

TapedScalar ScalarTape::constant(double value) {
    const std::size_t id = push(ScalarOp::constant, 0, 0, 1.0);
    slot(id)[0] = value;
    return {this, id};
}

TapedScalar ScalarTape::add(TapedScalar a, TapedScalar b, double scale) {
    check_handle(a);
    check_handle(b);
    const std::size_t id = push(ScalarOp::add, a.id, b.id, scale);
    utps::add(value(a.id), value(b.id), scale, slot(id), meter_);
    return {this, id};
}

TapedScalar ScalarTape::mul(TapedScalar a, TapedScalar b) {
    check_handle(a);
    check_handle(b);
    const std::size_t id = push(ScalarOp::mul, a.id, b.id, 1.0);
    utps::mul(value(a.id), value(b.id), slot(id), meter_);
    return {this, id};
}

TapedScalar ScalarTape::div(TapedScalar a, TapedScalar b) {
    check_handle(a);
    check_handle(b);
    if (value(b.id)[0] == 0.0) throw SingularLeadingCoefficientError("taped division by zero leading coefficient");
    const std::size_t id = push(ScalarOp::div, a.id, b.id, 1.0);
    utps::div(value(a.id), value(b.id), slot(id), meter_);
    return {this, id};
}

TapedScalar ScalarTape::sqrt(TapedScalar a) {
    check_handle(a);
    if (!(value(a.id)[0] > 0.0)) throw DomainError("taped sqrt of non-positive leading coefficient");
    const std::size_t id = push(ScalarOp::sqrt, a.id, 0, 1.0);
    utps::sqrt(value(a.id), slot(id), meter_);
    return {this, id};
}

TapedScalar ScalarTape::neg(TapedScalar a) {
    check_handle(a);
    const std::size_t id = push(ScalarOp::neg, a.id, 0, 1.0);
    auto out = slot(id);
    auto in = value(a.id);
    for (std::size_t d = 0; d < stride(); ++d) out[d] = -in[d];
    return {this, id};
}

void ScalarTape::mark_output(TapedScalar s) {
    check_handle(s);
    outputs_.push_back(s.id);
}

TaylorScalar ScalarTape::taylor_value(std::size_t id) const {
    auto v = value(id);
    return TaylorScalar(std::vector<double>(v.begin(), v.end()));
}

std::vector<TaylorScalar> scalar_reverse_sweep(const ScalarTape& tape, std::span<const TaylorScalar> seeds) {
    if (seeds.size() != tape.outputs().size()) {
        throw UsageError("scalar sweep: expected " + std::to_string(tape.outputs().size()) + " seeds, got " +
                         std::to_string(seeds.size()));
    }
    const std::size_t stride = tape.degree() + 1;
    OpMeter* meter = tape.meter();
    std::vector<double> adjoints(tape.entry_count() * stride, 0.0);
    auto bar = [&](std::size_t id) { return std::span<double>(adjoints.data() + id * stride, stride); };

    for (std::size_t k = 0; k < seeds.size(); ++k) {
        if (seeds[k].degree() != tape.degree()) throw ShapeError("scalar sweep: seed degree mismatch");
        utps::add(bar(tape.outputs()[k]), seeds[k].coeffs(), 1.0, bar(tape.outputs()[k]));
    }

    std::vector<double> tmp(stride);
    const auto& entries = tape.entries();
    for (std::size_t id = entries.size(); id-- > 0;) {
        const ScalarTapeEntry& e = entries[id];
        const std::span<const double> phibar = bar(id);
        if (std::all_of(phibar.begin(), phibar.end(), [](double v) { return v == 0.0; })) continue;
        switch (e.op) {
            case ScalarOp::input:
            case ScalarOp::constant: break;
            case ScalarOp::add:
                utps::add(bar(e.args[0]), phibar, 1.0, bar(e.args[0]), meter);
                utps::add(bar(e.args[1]), phibar, e.add_scale, bar(e.args[1]), meter);
                break;
            case ScalarOp::mul:
                utps::mul_accumulate(phibar, tape.value(e.args[1]), 1.0, bar(e.args[0]), meter);
                utps::mul_accumulate(phibar, tape.value(e.args[0]), 1.0, bar(e.args[1]), meter);
                break;
            case ScalarOp::div:
                // t = phibar / v;  ubar += t;  vbar -= t * phi
                utps::div(phibar, tape.value(e.args[1]), tmp, meter);
                utps::add(bar(e.args[0]), tmp, 1.0, bar(e.args[0]), meter);
                utps::mul_accumulate(tmp, tape.value(id), -1.0, bar(e.args[1]), meter);
                break;
            case ScalarOp::sqrt:
                // ubar += phibar / (2 phi)
                utps::div(phibar, tape.value(id), tmp, meter);
                utps::add(bar(e.args[0]), tmp, 0.5, bar(e.args[0]), meter);
                break;
            case ScalarOp::neg: utps::add(bar(e.args[0]), phibar, -1.0, bar(e.args[0]), meter); break;
        }
    }

    std::vector<TaylorScalar> out;
    out.reserve(tape.inputs().size());
    for (std::size_t id : tape.inputs()) {
        auto b = bar(id);
        out.emplace_back(std::vector<double>(b.begin(), b.end()));
    }
    return out;
}

GivensRotation givens(TapedScalar a, TapedScalar b) {
    ScalarTape& tape = *a.tape;
    if (a.value() == 0.0 && b.value() == 0.0) {
        return {tape.constant(1.0), tape.constant(0.0), a, true};
    }
    const TapedScalar r = sqrt(a * a + b * b);
    return {a / r, b / r, r, false};
}

QrFactors qr_factor(std::span<const TapedScalar> x, std::size_t n) {
    if (x.size() != n * n) throw ShapeError("qr_factor: expected " + std::to_string(n * n) + " entries");
    if (n == 0) return {};
    ScalarTape& tape = *x.front().tape;
    QrFactors f{{x.begin(), x.end()}, {}};
    auto& r = f.r;
    auto& qt = f.qt;
    qt.reserve(n * n);
    const TapedScalar zero = tape.constant(0.0);
    const TapedScalar one = tape.constant(1.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) qt.push_back(i == j ? one : zero);

    auto rotate_rows = [](std::vector<TapedScalar>& m, std::size_t n, std::size_t k, std::size_t i,
                          std::size_t from, const GivensRotation& g) {
        for (std::size_t j = from; j < n; ++j) {
            const TapedScalar top = m[k * n + j];
            const TapedScalar bottom = m[i * n + j];
            m[k * n + j] = g.c * top + g.s * bottom;
            m[i * n + j] = g.c * bottom - g.s * top;
        }
    };

    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = k + 1; i < n; ++i) {
            const GivensRotation g = givens(r[k * n + k], r[i * n + k]);
            if (g.identity) continue;
            rotate_rows(r, n, k, i, k + 1, g);
            r[k * n + k] = g.r;
            r[i * n + k] = zero;
            rotate_rows(qt, n, k, i, 0, g);
        }
    }
    return f;
}

std::vector<TapedScalar> qr_inverse(std::span<const TapedScalar> x, std::size_t n) {
    double scale = 0.0;
    for (const TapedScalar& s : x) scale = std::max(scale, std::abs(s.value()));
    const QrFactors f = qr_factor(x, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double pivot = std::abs(f.r[k * n + k].value());
        if (scale == 0.0 || pivot <= 1e-12 * scale) {
            throw SingularMatrixError("QR inverse: R is singular at row " + std::to_string(k),
                                      scale == 0.0 ? 0.0 : pivot / scale);
        }
    }
    std::vector<TapedScalar> y(n * n);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t i = n; i-- > 0;) {
            TapedScalar acc = f.qt[i * n + c];
            for (std::size_t j = i + 1; j < n; ++j) acc = acc - f.r[i * n + j] * y[j * n + c];
            y[i * n + c] = acc / f.r[i * n + i];
        }
    }
    return y;
}

UtpsGradient utps_gradient_tr_inv(const TaylorMatrix& x, OpMeter* meter) {
    if (!x.is_square()) throw ShapeError("utps_gradient_tr_inv: X must be square");
    const std::size_t n = x.rows();
    ScalarTape tape(x.degree(), meter);
    std::vector<TapedScalar> entries;
    entries.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) entries.push_back(tape.input(x.entry(i, j)));

    const std::vector<TapedScalar> y = qr_inverse(entries, n);
    TapedScalar tr = y[0];
    for (std::size_t i = 1; i < n; ++i) tr = tr + y[i * n + i];
    tape.mark_output(tr);

    const std::array seed{TaylorScalar::constant(1.0, x.degree())};
    const std::vector<TaylorScalar> adj = scalar_reverse_sweep(tape, seed);

    UtpsGradient out{TaylorMatrix(n, n, x.degree()), tape.entry_count(), tape.peak_memory_coeffs()};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out.gradient.set_entry(i, j, adj[i * n + j]);
    return out;
}

UtpsGradient utps_gradient_tr_inv(const Matrix& x0, std::size_t degree, OpMeter* meter) {
    return utps_gradient_tr_inv(TaylorMatrix::constant(x0, degree), meter);
}

}  // namespace utpm
