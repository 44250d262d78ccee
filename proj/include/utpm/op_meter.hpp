#pragma once

#include <cstdint>
#include <ostream>
#include <utility>

namespace utpm {

/// Tallies of elementary-operation events.
///
/// Granularity is abstract: one `matrix_mul` per matrix-matrix product of
/// any size, one `scalar_mul` per real multiply. Memory traffic is ignored.
struct OpCounters {
    std::uint64_t matrix_mul = 0;
    std::uint64_t matrix_add = 0;
    std::uint64_t base_inverse = 0;
    std::uint64_t scalar_mul = 0;
    std::uint64_t scalar_add = 0;
    std::uint64_t scalar_div = 0;
    std::uint64_t scalar_sqrt = 0;

    OpCounters& operator+=(const OpCounters& o) noexcept {
        matrix_mul += o.matrix_mul;
        matrix_add += o.matrix_add;
        base_inverse += o.base_inverse;
        scalar_mul += o.scalar_mul;
        scalar_add += o.scalar_add;
        scalar_div += o.scalar_div;
        scalar_sqrt += o.scalar_sqrt;
        return *this;
    }

    friend OpCounters operator+(OpCounters a, const OpCounters& b) noexcept { return a += b; }

    friend OpCounters operator-(const OpCounters& a, const OpCounters& b) noexcept {
        return {a.matrix_mul - b.matrix_mul,     a.matrix_add - b.matrix_add,
                a.base_inverse - b.base_inverse, a.scalar_mul - b.scalar_mul,
                a.scalar_add - b.scalar_add,     a.scalar_div - b.scalar_div,
                a.scalar_sqrt - b.scalar_sqrt};
    }

    friend bool operator==(const OpCounters&, const OpCounters&) = default;
};

std::ostream& operator<<(std::ostream& os, const OpCounters& c);

/// Explicit metering context. Metered operations take an `OpMeter*`;
/// passing nullptr disables counting. One meter per thread of execution.
class OpMeter {
public:
    const OpCounters& counters() const noexcept { return counters_; }
    void reset() noexcept { counters_ = {}; }

    void matrix_mul(std::uint64_t k = 1) noexcept { counters_.matrix_mul += k; }
    void matrix_add(std::uint64_t k = 1) noexcept { counters_.matrix_add += k; }
    void base_inverse(std::uint64_t k = 1) noexcept { counters_.base_inverse += k; }
    void scalar_mul(std::uint64_t k = 1) noexcept { counters_.scalar_mul += k; }
    void scalar_add(std::uint64_t k = 1) noexcept { counters_.scalar_add += k; }
    void scalar_div(std::uint64_t k = 1) noexcept { counters_.scalar_div += k; }
    void scalar_sqrt(std::uint64_t k = 1) noexcept { counters_.scalar_sqrt += k; }

    void merge(const OpMeter& other) noexcept { counters_ += other.counters_; }

private:
    OpCounters counters_;
};

/// Runs `block` and returns the counter deltas it produced on `meter`.
/// Nested measurements compose additively.
template <class Block>
OpCounters measure(OpMeter& meter, Block&& block) {
    const OpCounters before = meter.counters();
    std::forward<Block>(block)();
    return meter.counters() - before;
}

struct MatrixOpCount {
    std::uint64_t matmuls = 0;
    std::uint64_t matadds = 0;
    friend bool operator==(const MatrixOpCount&, const MatrixOpCount&) = default;
};

struct ScalarOpCount {
    std::uint64_t muls = 0;
    std::uint64_t adds = 0;
    friend bool operator==(const ScalarOpCount&, const ScalarOpCount&) = default;
};

/// Matrix products and sums needed by the Taylor matrix inverse of degree
/// `degree`, beyond the single base inversion: ((D+3)D/2, (D-1)D/2).
constexpr MatrixOpCount predicted_tm_inv_ops(unsigned degree) noexcept {
    const std::uint64_t d = degree;
    return {(d + 3) * d / 2, d == 0 ? 0 : (d - 1) * d / 2};
}

/// Real multiplies and adds in one full product of two degree-D Taylor
/// scalars: ((D+2)(D+1)/2, (D+1)D/2).
constexpr ScalarOpCount predicted_ts_mul_ops(unsigned degree) noexcept {
    const std::uint64_t d = degree;
    return {(d + 2) * (d + 1) / 2, (d + 1) * d / 2};
}

}  // namespace utpm
