#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "utpm/bench.hpp"
#include "utpm/error.hpp"
#include "utpm/kernels.hpp"
#include "utpm/op_meter.hpp"
#include "utpm/scalar_tape.hpp"

namespace utpm::bench {
namespace {

using Clock = std::chrono::steady_clock;

std::mt19937_64 trial_rng(std::uint64_t seed, std::size_t trial, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(stream)};
    return std::mt19937_64(seq);
}

Matrix uniform_matrix(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Matrix m(n, n);
    for (double& v : m.data()) v = dist(rng);
    return m;
}

Matrix fixed_input(std::string_view name, std::size_t n) {
    if (name == "two-identity") {
        Matrix m = Matrix::identity(n);
        m *= 2.0;
        return m;
    }
    if (name == "ramp-diagonal") {
        std::vector<double> diag(n);
        for (std::size_t i = 0; i < n; ++i) diag[i] = static_cast<double>(i + 1);
        return Matrix::diagonal(diag);
    }
    throw UsageError("unknown fixed input '" + std::string(name) + "' (expected two-identity or ramp-diagonal)");
}

Matrix product(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows(), b.cols());
    kernels::gemm(a, b, c);
    return c;
}

double tr_inv_value(const Matrix& x) { return kernels::LuFactorization(x).inverse().trace(); }

// max |fd - g| / max(1, max|g|) with central differences of tr(X^{-1}).
double finite_difference_error(const Matrix& x, const Matrix& grad) {
    const double h = 1e-5 * std::max(1.0, x.max_abs());
    double err = 0.0;
    Matrix xp = x;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            const double orig = xp(i, j);
            xp(i, j) = orig + h;
            const double fp = tr_inv_value(xp);
            xp(i, j) = orig - h;
            const double fm = tr_inv_value(xp);
            xp(i, j) = orig;
            err = std::max(err, std::abs((fp - fm) / (2.0 * h) - grad(i, j)));
        }
    }
    return err / std::max(1.0, grad.max_abs());
}

struct TrialOutcome {
    std::vector<BenchRecord> records;
    std::vector<std::string> diagnostics;
    bool check_failed = false;
};

TrialOutcome run_trial(const BenchConfig& cfg, std::size_t trial) {
    TrialOutcome out;
    const std::size_t n = cfg.n;
    const Matrix x0 = cfg.fixed_input ? fixed_input(*cfg.fixed_input, n) : sample_input(n, cfg.seed, trial);
    TaylorMatrix x = TaylorMatrix::constant(x0, cfg.degree);
    Matrix v;
    if (cfg.degree >= 1) {
        v = sample_direction(n, cfg.seed, trial);
        x[1] = v;
    }

    std::optional<TaylorMatrix> grad_utpm, grad_utps;
    BenchRecord base;
    base.n = n;
    base.degree = cfg.degree;
    base.trial = trial;

    try {
        if (cfg.mode != Mode::utps) {
            OpMeter meter;
            const auto t0 = Clock::now();
            MatrixGraph g = tr_inv_program(n);
            std::vector<TaylorMatrix> adj = taylor_adjoints(g, std::span<const TaylorMatrix>(&x, 1), &meter);
            const auto t1 = Clock::now();
            BenchRecord r = base;
            r.mode = "utpm";
            r.wall_time_seconds = std::chrono::duration<double>(t1 - t0).count();
            r.tape_entries = g.size();
            r.matrix_mul_count = meter.counters().matrix_mul;
            r.scalar_mul_count = meter.counters().scalar_mul;
            grad_utpm = std::move(adj.front());
            out.records.push_back(r);
        }
        if (cfg.mode != Mode::utpm) {
            OpMeter meter;
            const auto t0 = Clock::now();
            UtpsGradient res = utps_gradient_tr_inv(x, &meter);
            const auto t1 = Clock::now();
            BenchRecord r = base;
            r.mode = "utps";
            r.wall_time_seconds = std::chrono::duration<double>(t1 - t0).count();
            r.tape_entries = res.entry_count;
            r.matrix_mul_count = meter.counters().matrix_mul;
            r.scalar_mul_count = meter.counters().scalar_mul;
            grad_utps = std::move(res.gradient);
            out.records.push_back(r);
        }
    } catch (const SingularMatrixError& e) {
        out.records.clear();
        out.diagnostics.push_back("trial " + std::to_string(trial) + " skipped: " + e.what());
        return out;
    }

    const Matrix analytic = analytic_gradient_tr_inv(x0);
    std::optional<Matrix> analytic_hv;
    if (cfg.degree >= 1) analytic_hv = analytic_hessian_vector_tr_inv(x0, v);
    const double cross = grad_utpm && grad_utps ? max_abs_diff(*grad_utpm, *grad_utps) : 0.0;

    for (BenchRecord& r : out.records) {
        const TaylorMatrix& g = r.mode == "utpm" ? *grad_utpm : *grad_utps;
        double err = max_abs_diff(g[0], analytic);
        if (analytic_hv) err = std::max(err, max_abs_diff(g[1], *analytic_hv));
        r.max_abs_err_vs_analytic = err;
        r.max_abs_err_cross = cross;
        if (cfg.check) {
            const double fd = finite_difference_error(x0, g[0]);
            if (!(fd <= 1e-4)) {
                out.check_failed = true;
                out.diagnostics.push_back("trial " + std::to_string(trial) + " " + r.mode +
                                          ": finite-difference relative error " + std::to_string(fd));
            }
        }
    }
    if (cfg.check) {
        const double scale = std::max(1.0, analytic.max_abs());
        for (const BenchRecord& r : out.records) {
            if (!(r.max_abs_err_vs_analytic <= 1e-10 * scale)) {
                out.check_failed = true;
                out.diagnostics.push_back("trial " + std::to_string(trial) + " " + r.mode +
                                          ": analytic gradient error " + std::to_string(r.max_abs_err_vs_analytic));
            }
        }
    }
    return out;
}

void append_double(std::string& line, double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    line.append(buf, res.ptr);
}

}  // namespace

std::string_view to_string(Mode m) noexcept {
    switch (m) {
        case Mode::utpm: return "utpm";
        case Mode::utps: return "utps";
        case Mode::both: return "both";
    }
    return "?";
}

Mode parse_mode(std::string_view s) {
    if (s == "utpm") return Mode::utpm;
    if (s == "utps") return Mode::utps;
    if (s == "both") return Mode::both;
    throw UsageError("unknown mode '" + std::string(s) + "' (expected utpm, utps or both)");
}

void validate(const BenchConfig& config) {
    if (config.n < 1) throw UsageError("--n must be >= 1");
    if (config.trials < 1) throw UsageError("--trials must be >= 1");
    if (config.fixed_input) fixed_input(*config.fixed_input, 1);
}

Matrix sample_input(std::size_t n, std::uint64_t seed, std::size_t trial) {
    auto rng = trial_rng(seed, trial, 0);
    Matrix x = uniform_matrix(n, rng);
    for (std::size_t i = 0; i < n; ++i) x(i, i) += static_cast<double>(n);
    return x;
}

Matrix sample_direction(std::size_t n, std::uint64_t seed, std::size_t trial) {
    auto rng = trial_rng(seed, trial, 1);
    return uniform_matrix(n, rng);
}

Matrix analytic_gradient_tr_inv(const Matrix& x) {
    const Matrix xi = kernels::LuFactorization(x).inverse();
    Matrix g = product(xi, xi).transposed();
    g *= -1.0;
    return g;
}

Matrix analytic_hessian_vector_tr_inv(const Matrix& x, const Matrix& v) {
    const Matrix xi = kernels::LuFactorization(x).inverse();
    const Matrix xi2 = product(xi, xi);
    Matrix h = product(product(xi, v), xi2);
    kernels::axpy(1.0, product(product(xi2, v), xi), h);
    return h.transposed();
}

BenchResult run_bench(const BenchConfig& config) {
    validate(config);
    std::vector<TrialOutcome> outcomes(config.trials);
#pragma omp parallel for schedule(dynamic) if (config.parallel)
    for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(config.trials); ++t) {
        outcomes[t] = run_trial(config, static_cast<std::size_t>(t));
    }
    BenchResult result;
    for (TrialOutcome& o : outcomes) {
        result.records.insert(result.records.end(), o.records.begin(), o.records.end());
        result.diagnostics.insert(result.diagnostics.end(), o.diagnostics.begin(), o.diagnostics.end());
        result.check_failed = result.check_failed || o.check_failed;
    }
    return result;
}

std::string csv_header() {
    return "mode,n,degree,trial,wall_time_seconds,tape_entries,matrix_mul_count,scalar_mul_count,"
           "max_abs_err_vs_analytic,max_abs_err_cross";
}

void write_csv(std::ostream& os, std::span<const BenchRecord> records) {
    os << csv_header() << '\n';
    for (const BenchRecord& r : records) {
        std::string line = r.mode;
        for (std::uint64_t v : {std::uint64_t{r.n}, std::uint64_t{r.degree}, std::uint64_t{r.trial}}) {
            line += ',' + std::to_string(v);
        }
        line += ',';
        append_double(line, r.wall_time_seconds);
        line += ',' + std::to_string(r.tape_entries) + ',' + std::to_string(r.matrix_mul_count) + ',' +
                std::to_string(r.scalar_mul_count) + ',';
        append_double(line, r.max_abs_err_vs_analytic);
        line += ',';
        append_double(line, r.max_abs_err_cross);
        os << line << '\n';
    }
}

double median_wall_time(std::span<const BenchRecord> records, std::string_view mode) {
    std::vector<double> times;
    for (const BenchRecord& r : records)
        if (r.mode == mode) times.push_back(r.wall_time_seconds);
    if (times.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(times.begin(), times.end());
    const std::size_t m = times.size() / 2;
    return times.size() % 2 ? times[m] : 0.5 * (times[m - 1] + times[m]);
}

}  // namespace utpm::bench
