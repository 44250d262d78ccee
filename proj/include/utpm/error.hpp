#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace utpm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mismatched shapes or degrees between operands.
class ShapeError : public Error {
public:
    using Error::Error;
};

class InvalidDegreeError : public Error {
public:
    using Error::Error;
};

/// Argument outside the domain of an elementary function (e.g. sqrt of a non-positive leading coefficient).
class DomainError : public Error {
public:
    using Error::Error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

/// Division by a Taylor polynomial whose constant term is zero.
class SingularLeadingCoefficientError : public Error {
public:
    using Error::Error;
};

/// Base matrix is singular or numerically close to it.
///
/// `pivot_ratio` is |smallest pivot| / max|entry|; its reciprocal is a cheap
/// lower bound on the condition number. `node` identifies the graph node
/// whose inversion failed, when raised from a graph evaluation.
class SingularMatrixError : public Error {
public:
    SingularMatrixError(const std::string& what, double pivot_ratio,
                        std::optional<std::size_t> node = std::nullopt)
        : Error(what), pivot_ratio_(pivot_ratio), node_(node) {}

    double pivot_ratio() const noexcept { return pivot_ratio_; }
    double condition_estimate() const noexcept {
        return pivot_ratio_ > 0.0 ? 1.0 / pivot_ratio_ : std::numeric_limits<double>::infinity();
    }
    std::optional<std::size_t> node() const noexcept { return node_; }

private:
    double pivot_ratio_;
    std::optional<std::size_t> node_;
};

/// Operation invoked in the wrong phase (e.g. reverse sweep before forward evaluation).
class StateError : public Error {
public:
    using Error::Error;
};

/// API misuse that is not a shape problem (wrong number of seeds, dependents, ...).
class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace utpm
