#include <iomanip>
#include <random>
#include <string>

#include "utpm/bench.hpp"
#include "utpm/taylor_matrix.hpp"

namespace utpm::bench {

std::vector<ComplexityRow> measure_complexity(std::size_t max_degree) {
    std::vector<ComplexityRow> rows;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    constexpr std::size_t n = 4;
    for (std::size_t degree = 1; degree <= max_degree; ++degree) {
        TaylorMatrix x(n, n, degree);
        for (std::size_t d = 0; d <= degree; ++d)
            for (double& v : x[d].data()) v = dist(rng);
        for (std::size_t i = 0; i < n; ++i) x[0](i, i) += static_cast<double>(n);
        TaylorScalar u(degree), v(degree);
        for (std::size_t d = 0; d <= degree; ++d) {
            u[d] = dist(rng);
            v[d] = dist(rng);
        }

        OpMeter meter;
        const OpCounters inv_ops = measure(meter, [&] { (void)inv(x, &meter); });
        const OpCounters mul_ops = measure(meter, [&] { (void)mul(u, v, &meter); });

        ComplexityRow row;
        row.degree = degree;
        row.inv_measured = {inv_ops.matrix_mul, inv_ops.matrix_add};
        row.inv_predicted = predicted_tm_inv_ops(static_cast<unsigned>(degree));
        row.mul_measured = {mul_ops.scalar_mul, mul_ops.scalar_add};
        row.mul_predicted = predicted_ts_mul_ops(static_cast<unsigned>(degree));
        rows.push_back(row);
    }
    return rows;
}

namespace {

std::string pair(std::uint64_t a, std::uint64_t b) {
    return "(" + std::to_string(a) + ", " + std::to_string(b) + ")";
}

}  // namespace

bool report_complexity(std::span<const ComplexityRow> rows, std::ostream& os) {
    bool ok = true;
    os << "Taylor matrix inverse (beyond one base inversion)\n";
    os << "  D  measured(matmul,matadd)  predicted(matmul,matadd)\n";
    for (const ComplexityRow& r : rows) {
        const bool match = r.inv_measured == r.inv_predicted;
        ok = ok && match;
        os << std::setw(3) << r.degree << "  " << std::left << std::setw(25)
           << pair(r.inv_measured.matmuls, r.inv_measured.matadds)
           << pair(r.inv_predicted.matmuls, r.inv_predicted.matadds) << std::right
           << (match ? "" : "  MISMATCH") << '\n';
    }
    os << "Taylor scalar product\n";
    os << "  D  measured(mul,add)  predicted(mul,add)\n";
    for (const ComplexityRow& r : rows) {
        const bool match = r.mul_measured == r.mul_predicted;
        ok = ok && match;
        os << std::setw(3) << r.degree << "  " << std::left << std::setw(19)
           << pair(r.mul_measured.muls, r.mul_measured.adds) << pair(r.mul_predicted.muls, r.mul_predicted.adds)
           << std::right << (match ? "" : "  MISMATCH") << '\n';
    }
    return ok;
}

}  // namespace utpm::bench
