#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "utpm/bench.hpp"
#include "utpm/error.hpp"
#include "utpm/kernels.hpp"
#include "utpm/pullback.hpp"
#include "utpm/scalar_tape.hpp"

namespace utpm::bench {
namespace {

struct Failure {
    std::string detail;
};

void expect(bool ok, const std::string& detail) {
    if (!ok) throw Failure{detail};
}

void expect_near(double got, double want, double tol, const std::string& what) {
    if (!(std::abs(got - want) <= tol)) {
        std::ostringstream os;
        os.precision(17);
        os << what << ": got " << got << ", want " << want;
        throw Failure{os.str()};
    }
}

void expect_taylor(const TaylorScalar& got, std::initializer_list<double> want, double tol, const std::string& what) {
    expect(got.degree() + 1 == want.size(), what + ": wrong degree");
    std::size_t d = 0;
    for (double w : want) {
        expect_near(got[d], w, tol, what + " coefficient " + std::to_string(d));
        ++d;
    }
}

TaylorMatrix random_taylor(std::size_t rows, std::size_t cols, std::size_t degree, std::mt19937_64& rng,
                           double diag_shift = 0.0) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    TaylorMatrix m(rows, cols, degree);
    for (std::size_t d = 0; d <= degree; ++d)
        for (double& v : m[d].data()) v = dist(rng);
    for (std::size_t i = 0; i < std::min(rows, cols); ++i) m[0](i, i) += diag_shift;
    return m;
}

// <A, B> = sum_ij A_ij * B_ij in Taylor arithmetic.
TaylorScalar pairing(const TaylorMatrix& a, const TaylorMatrix& b) {
    return trace(mul(transpose(a), b));
}

// Central difference of a Taylor-valued objective along a Taylor direction.
TaylorScalar central_difference(const std::function<TaylorScalar(double)>& along, double h) {
    TaylorScalar diff = add(along(h), along(-h), -1.0);
    for (std::size_t d = 0; d <= diff.degree(); ++d) diff[d] /= 2.0 * h;
    return diff;
}

void expect_pairing(const TaylorScalar& fd, const TaylorScalar& adjoint, const std::string& what) {
    for (std::size_t d = 0; d <= fd.degree(); ++d) {
        const double scale = std::max(1.0, std::abs(adjoint[d]));
        expect_near(fd[d], adjoint[d], 1e-4 * scale, what + " coefficient " + std::to_string(d));
    }
}

void check_scalar_forward() {
    // f(x, y) = x^2 y in the direction of x.
    const double x = 1.7, y = -0.6;
    const TaylorScalar tx = lift(x, 1.0, 1);
    const TaylorScalar ty = TaylorScalar{y, 0.0};
    const TaylorScalar f = mul(mul(tx, tx), ty);
    expect_taylor(f, {x * x * y, 2 * x * y}, 1e-14, "[x^2 y, 2xy]");
}

void check_scalar_reverse() {
    const double x = 1.7, y = -0.6;
    ScalarTape tape(0);
    const TapedScalar tx = tape.input(TaylorScalar{x});
    const TapedScalar ty = tape.input(TaylorScalar{y});
    tape.mark_output(tx * tx * ty);
    const std::array seed{TaylorScalar{1.0}};
    const auto adj = scalar_reverse_sweep(tape, seed);
    expect_near(adj[0][0], 2 * y * x, 1e-14, "xbar");
    expect_near(adj[1][0], x * x, 1e-14, "ybar");
}

void check_hessian_table_scalar() {
    ScalarTape tape(1);
    const TapedScalar x1 = tape.input(TaylorScalar{2, 1});
    const TapedScalar x2 = tape.input(TaylorScalar{3, 0});
    const TapedScalar x3 = tape.input(TaylorScalar{7, 0});
    const TapedScalar v1 = x1 * x2;
    const TapedScalar v2 = v1 * x3;
    expect_taylor(tape.taylor_value(v1.id), {6, 3}, 0.0, "[v1]");
    expect_taylor(tape.taylor_value(v2.id), {42, 21}, 0.0, "[v2]");
    tape.mark_output(v2);
    const std::array seed{TaylorScalar{1, 0}};
    const auto adj = scalar_reverse_sweep(tape, seed);
    expect_taylor(adj[0], {21, 0}, 1e-14, "[x1bar]");
    expect_taylor(adj[1], {14, 7}, 1e-14, "[x2bar]");
    expect_taylor(adj[2], {6, 3}, 1e-14, "[x3bar]");
}

void check_hessian_table_graph() {
    MatrixGraph g;
    const NodeId a = g.independent(1, 1), b = g.independent(1, 1), c = g.independent(1, 1);
    g.mark_dependent(g.mul(g.mul(a, b), c));
    const std::vector<Matrix> x{Matrix{{2}}, Matrix{{3}}, Matrix{{7}}};
    const std::vector<Matrix> v{Matrix{{1}}, Matrix{{0}}, Matrix{{0}}};
    const auto hv = hessian_vector(g, x, v);
    expect_near(hv[0](0, 0), 0.0, 1e-14, "H e1 [0]");
    expect_near(hv[1](0, 0), 7.0, 1e-14, "H e1 [1]");
    expect_near(hv[2](0, 0), 3.0, 1e-14, "H e1 [2]");
}

void check_sin_exp() {
    // f = sin(exp(x)): [xbar] = [cos(y0) e^x0, cos(y0) e^x0 x1 - sin(y0) y1 e^x0], y = exp(x).
    const double x0 = 0.3, x1 = 1.0;
    MatrixGraph g;
    const NodeId x = g.independent(1, 1);
    g.mark_dependent(g.sin(g.exp(x)));
    const TaylorMatrix in = TaylorMatrix::from_scalar(TaylorScalar{x0, x1});
    const auto adj = taylor_adjoints(g, std::span<const TaylorMatrix>(&in, 1));
    const double y0 = std::exp(x0), y1 = std::exp(x0) * x1;
    const TaylorScalar got = adj.front().to_scalar();
    expect_taylor(got, {std::cos(y0) * std::exp(x0), std::cos(y0) * std::exp(x0) * x1 - std::sin(y0) * y1 * std::exp(x0)},
                  1e-14, "[xbar]");
}

void check_inverse_recursion() {
    std::mt19937_64 rng(11);
    const TaylorMatrix a = random_taylor(4, 4, 0, rng);
    TaylorMatrix x = TaylorMatrix::identity(4, 1);
    x[1] = a[0];
    const TaylorMatrix y = inv(x);
    expect(max_abs_diff(y[0], Matrix::identity(4)) == 0.0, "Y_0 != I");
    Matrix minus_a = a[0];
    minus_a *= -1.0;
    expect(max_abs_diff(y[1], minus_a) <= 1e-15, "Y_1 != -A");

    const TaylorMatrix r = random_taylor(5, 5, 3, rng, 5.0);
    const double residual = max_abs_diff(mul(r, inv(r)), TaylorMatrix::identity(5, 3));
    expect(residual < 1e-10, "residual " + std::to_string(residual));
}

void check_pairing_mul() {
    std::mt19937_64 rng(21);
    const TaylorMatrix x = random_taylor(3, 3, 1, rng), y = random_taylor(3, 3, 1, rng);
    const TaylorMatrix zbar = random_taylor(3, 3, 1, rng);
    const TaylorMatrix dx = random_taylor(3, 3, 1, rng), dy = random_taylor(3, 3, 1, rng);
    TaylorMatrix xbar(3, 3, 1), ybar(3, 3, 1);
    pullback::mul(zbar, x, y, xbar, ybar);
    const TaylorScalar fd = central_difference(
        [&](double h) { return pairing(zbar, mul(add(x, dx, h), add(y, dy, h))); }, 1e-5);
    expect_pairing(fd, add(pairing(xbar, dx), pairing(ybar, dy)), "pairing");
}

void check_pairing_inv() {
    std::mt19937_64 rng(22);
    const TaylorMatrix x = random_taylor(3, 3, 1, rng, 3.0);
    const TaylorMatrix ybar = random_taylor(3, 3, 1, rng), dx = random_taylor(3, 3, 1, rng);
    TaylorMatrix xbar(3, 3, 1);
    pullback::inv(ybar, inv(x), xbar);
    const TaylorScalar fd = central_difference([&](double h) { return pairing(ybar, inv(add(x, dx, h))); }, 1e-5);
    expect_pairing(fd, pairing(xbar, dx), "pairing");
}

void check_pairing_transpose() {
    std::mt19937_64 rng(23);
    const TaylorMatrix x = random_taylor(2, 3, 1, rng);
    const TaylorMatrix ybar = random_taylor(3, 2, 1, rng), dx = random_taylor(2, 3, 1, rng);
    TaylorMatrix xbar(2, 3, 1);
    pullback::transpose(ybar, xbar);
    const TaylorScalar fd = central_difference([&](double h) { return pairing(ybar, transpose(add(x, dx, h))); }, 1e-5);
    expect_pairing(fd, pairing(xbar, dx), "pairing");
}

void check_pairing_trace() {
    std::mt19937_64 rng(24);
    const TaylorMatrix x = random_taylor(3, 3, 1, rng), dx = random_taylor(3, 3, 1, rng);
    const TaylorScalar ybar{0.7, -1.3};
    TaylorMatrix xbar(3, 3, 1);
    pullback::trace(ybar, 3, xbar);
    const TaylorScalar fd = central_difference([&](double h) { return mul(ybar, trace(add(x, dx, h))); }, 1e-5);
    expect_pairing(fd, pairing(xbar, dx), "pairing");
}

void check_gradient_tr_inv() {
    for (std::size_t n = 1; n <= 6; ++n) {
        const Matrix x = sample_input(n, 5, n);
        MatrixGraph g = tr_inv_program(n);
        const double err = max_abs_diff(gradient(g, x), analytic_gradient_tr_inv(x));
        expect(err <= 1e-10, "n=" + std::to_string(n) + " error " + std::to_string(err));
    }
    MatrixGraph g = tr_inv_program(2);
    Matrix x = Matrix::identity(2);
    x *= 2.0;
    Matrix want = Matrix::identity(2);
    want *= -0.25;
    expect(max_abs_diff(gradient(g, x), want) <= 1e-15, "X = 2I");
}

void check_gradient_oed() {
    for (std::size_t n = 1; n <= 4; ++n) {
        MatrixGraph g = oed_program(n, n);
        Matrix want = Matrix::identity(n);
        want *= -2.0;
        const double err = max_abs_diff(gradient(g, Matrix::identity(n)), want);
        expect(err <= 1e-10, "n=" + std::to_string(n) + " error " + std::to_string(err));
    }
}

void check_cross_mode() {
    for (std::size_t degree = 0; degree <= 1; ++degree) {
        const std::size_t n = 6;
        TaylorMatrix x = TaylorMatrix::constant(sample_input(n, 9, degree), degree);
        if (degree) x[1] = sample_direction(n, 9, degree);
        MatrixGraph g = tr_inv_program(n);
        const TaylorMatrix a = taylor_adjoints(g, std::span<const TaylorMatrix>(&x, 1)).front();
        const TaylorMatrix b = utps_gradient_tr_inv(x).gradient;
        const double err = max_abs_diff(a, b);
        expect(err <= 1e-8, "degree " + std::to_string(degree) + " error " + std::to_string(err));
    }
}

void check_complexity() {
    for (const ComplexityRow& row : measure_complexity(4)) {
        expect(row.matches(), "mismatch at D=" + std::to_string(row.degree));
    }
}

}  // namespace

std::vector<CheckResult> run_verify() {
    const std::vector<std::pair<std::string, void (*)()>> checks{
        {"scalar forward x^2 y", check_scalar_forward},
        {"scalar reverse x^2 y", check_scalar_reverse},
        {"hessian-vector table (scalar tape)", check_hessian_table_scalar},
        {"hessian-vector (0, 7, 3) (matrix graph)", check_hessian_table_graph},
        {"sin(exp(x)) combined mode", check_sin_exp},
        {"taylor inverse recursion", check_inverse_recursion},
        {"pairing check: mul pullback", check_pairing_mul},
        {"pairing check: inv pullback", check_pairing_inv},
        {"pairing check: transpose pullback", check_pairing_transpose},
        {"pairing check: trace pullback", check_pairing_trace},
        {"gradient tr(X^-1) vs analytic", check_gradient_tr_inv},
        {"gradient tr((J^T J)^-1) at J = I", check_gradient_oed},
        {"UTPS/UTPM agreement", check_cross_mode},
        {"operation-count formulas", check_complexity},
    };
    std::vector<CheckResult> results;
    for (const auto& [name, fn] : checks) {
        CheckResult r{name, false, {}};
        try {
            fn();
            r.passed = true;
        } catch (const Failure& f) {
            r.detail = f.detail;
        } catch (const std::exception& e) {
            r.detail = std::string("exception: ") + e.what();
        }
        results.push_back(std::move(r));
    }
    return results;
}

bool report_verify(std::span<const CheckResult> results, std::ostream& os) {
    const CheckResult* first_failure = nullptr;
    for (const CheckResult& r : results) {
        os << (r.passed ? "PASS  " : "FAIL  ") << r.name;
        if (!r.passed) os << "  (" << r.detail << ")";
        os << '\n';
        if (!r.passed && !first_failure) first_failure = &r;
    }
    if (first_failure) {
        os << "verify: FAILED at '" << first_failure->name << "'\n";
        return false;
    }
    os << "verify: all " << results.size() << " checks passed\n";
    return true;
}

}  // namespace utpm::bench
