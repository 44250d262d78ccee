#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "utpm/matrix.hpp"
#include "utpm/matrix_graph.hpp"

// Harness behind the `utpm` command-line tool: gradient of tr(X^{-1})
// through the matrix graph versus the taped scalar QR baseline, the golden
// verification suite, the operation-count table and builtin programs.
namespace utpm::bench {

enum class Mode { utpm, utps, both };

std::string_view to_string(Mode m) noexcept;
/// Throws UsageError for anything other than utpm|utps|both.
Mode parse_mode(std::string_view s);

struct BenchConfig {
    std::size_t n = 8;
    std::size_t degree = 0;
    Mode mode = Mode::both;
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    bool check = false;
    std::optional<std::string> csv_path;
    std::optional<std::string> fixed_input;  // "two-identity" or "ramp-diagonal"
    bool parallel = false;                   // run trials concurrently
};

/// One measured run; fields in CSV column order.
struct BenchRecord {
    std::string mode;
    std::size_t n = 0;
    std::size_t degree = 0;
    std::size_t trial = 0;
    double wall_time_seconds = 0.0;
    std::size_t tape_entries = 0;
    std::uint64_t matrix_mul_count = 0;
    std::uint64_t scalar_mul_count = 0;
    double max_abs_err_vs_analytic = 0.0;
    double max_abs_err_cross = 0.0;
};

struct BenchResult {
    std::vector<BenchRecord> records;
    std::vector<std::string> diagnostics;  // skipped trials, failed checks
    bool check_failed = false;
};

/// Throws UsageError for an invalid config (n, trials < 1; unknown fixed input).
void validate(const BenchConfig& config);

/// X = U + n I with U_ij iid uniform on [-1, 1]; deterministic in (seed, trial).
Matrix sample_input(std::size_t n, std::uint64_t seed, std::size_t trial);
/// Direction used for the degree-1 coefficient when degree >= 1.
Matrix sample_direction(std::size_t n, std::uint64_t seed, std::size_t trial);

BenchResult run_bench(const BenchConfig& config);

/// Analytic gradient of tr(X^{-1}): -(X^{-2})^T.
Matrix analytic_gradient_tr_inv(const Matrix& x);
/// Analytic directional derivative of that gradient along V:
/// (X^{-1} V X^{-2} + X^{-2} V X^{-1})^T.
Matrix analytic_hessian_vector_tr_inv(const Matrix& x, const Matrix& v);

std::string csv_header();
void write_csv(std::ostream& os, std::span<const BenchRecord> records);
/// Median wall time of the records with the given mode; NaN if none.
double median_wall_time(std::span<const BenchRecord> records, std::string_view mode);

/// tr(X^{-1}) for an n x n independent.
MatrixGraph tr_inv_program(std::size_t n);
/// tr((J^T J)^{-1}) for an m x p independent J.
MatrixGraph oed_program(std::size_t m, std::size_t p);
/// Seven-statement demo program with variable rebinding: independents X, Y
/// (n x n), dependent tr(Z).
MatrixGraph fig1_program(std::size_t n);
/// Builtin by name: fig1 | tr_inv | oed. Throws UsageError otherwise.
MatrixGraph builtin_program(std::string_view name, std::size_t n = 3);

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Golden examples and invariants. Never throws; exceptions become failures.
std::vector<CheckResult> run_verify();
/// Prints one line per check plus a summary; returns true iff all passed.
bool report_verify(std::span<const CheckResult> results, std::ostream& os);

struct ComplexityRow {
    std::size_t degree = 0;
    MatrixOpCount inv_measured, inv_predicted;
    ScalarOpCount mul_measured, mul_predicted;
    bool matches() const noexcept { return inv_measured == inv_predicted && mul_measured == mul_predicted; }
};

std::vector<ComplexityRow> measure_complexity(std::size_t max_degree);
/// Prints both tables; returns true iff every row matches.
bool report_complexity(std::span<const ComplexityRow> rows, std::ostream& os);

}  // namespace utpm::bench
