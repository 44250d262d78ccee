// utpm: benchmark and verification front end.
//
//   utpm bench --n 64 --degree 0 --mode both --trials 5 --seed 1 [--check] [--csv out.csv]
//   utpm verify
//   utpm complexity --max-degree 4
//   utpm graph fig1|tr_inv|oed
//
// Exit codes: 0 success, 1 verification/complexity failure, 2 usage error, 3 I/O error.

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "utpm/bench.hpp"
#include "utpm/error.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;
constexpr int kIo = 3;

int cmd_bench(const utpm::bench::BenchConfig& config) {
    using namespace utpm::bench;
    std::ofstream csv;
    if (config.csv_path) {
        csv.open(*config.csv_path);
        if (!csv) {
            std::cerr << "error: cannot open '" << *config.csv_path << "' for writing\n";
            return kIo;
        }
    }
    const BenchResult result = run_bench(config);
    for (const std::string& d : result.diagnostics) std::cerr << d << '\n';

    if (config.csv_path) {
        write_csv(csv, result.records);
        csv.flush();
        if (!csv) {
            std::cerr << "error: failed writing '" << *config.csv_path << "'\n";
            return kIo;
        }
    } else {
        write_csv(std::cout, result.records);
    }

    const double t_utpm = median_wall_time(result.records, "utpm");
    const double t_utps = median_wall_time(result.records, "utps");
    std::ostream& summary = config.csv_path ? std::cout : std::cerr;
    summary << "median wall time [s]: utpm=" << t_utpm << " utps=" << t_utps;
    if (t_utpm > 0.0 && t_utps > 0.0) summary << " speedup=" << t_utps / t_utpm;
    summary << '\n';
    return result.check_failed ? kFailed : kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Taylor propagation on matrices: benchmark and verification tool"};
    app.require_subcommand(1);

    utpm::bench::BenchConfig config;
    std::string mode = "both";
    std::string csv_path, fixed_input;
    auto* bench = app.add_subcommand("bench", "gradient of tr(X^-1): matrix graph vs taped scalar QR");
    bench->add_option("--n", config.n, "matrix dimension")->required()->check(CLI::PositiveNumber);
    bench->add_option("--degree", config.degree, "Taylor degree")->required();
    bench->add_option("--mode", mode, "utpm | utps | both")->required();
    bench->add_option("--trials", config.trials, "repetitions")->required()->check(CLI::PositiveNumber);
    bench->add_option("--seed", config.seed, "RNG seed")->required();
    bench->add_flag("--check", config.check, "verify against analytic gradient and finite differences");
    bench->add_option("--csv", csv_path, "write records to this CSV file");
    bench->add_option("--fixed-input", fixed_input, "use a fixed matrix: two-identity | ramp-diagonal");
    bench->add_flag("--parallel", config.parallel, "run trials concurrently");

    auto* verify = app.add_subcommand("verify", "run the golden-example suite");

    std::size_t max_degree = 4;
    auto* complexity = app.add_subcommand("complexity", "measured vs predicted operation counts");
    complexity->add_option("--max-degree", max_degree, "highest Taylor degree")->required()->check(CLI::PositiveNumber);

    std::string program;
    std::size_t graph_n = 3;
    auto* graph = app.add_subcommand("graph", "print a builtin program's computational graph");
    graph->add_option("program", program, "fig1 | tr_inv | oed")->required();
    graph->add_option("--n", graph_n, "matrix dimension")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*bench) {
            config.mode = utpm::bench::parse_mode(mode);
            if (!csv_path.empty()) config.csv_path = csv_path;
            if (!fixed_input.empty()) config.fixed_input = fixed_input;
            utpm::bench::validate(config);
            return cmd_bench(config);
        }
        if (*verify) {
            const auto results = utpm::bench::run_verify();
            return utpm::bench::report_verify(results, std::cout) ? kOk : kFailed;
        }
        if (*complexity) {
            const auto rows = utpm::bench::measure_complexity(max_degree);
            return utpm::bench::report_complexity(rows, std::cout) ? kOk : kFailed;
        }
        if (*graph) {
            std::cout << utpm::dump_graph(utpm::bench::builtin_program(program, graph_n));
            return kOk;
        }
    } catch (const utpm::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailed;
    }
    return kUsage;
}
