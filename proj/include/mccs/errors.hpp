#pragma once

#include <stdexcept>
#include <string>

namespace mccs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of a formula (non-positive rate, negative vol, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A discount curve was asked for a point beyond its last knot.
class CoverageError : public Error {
public:
    using Error::Error;
};

/// Malformed argument or configuration value.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Not enough data to build a panel, fit a model, or run a backtest step.
class DataError : public Error {
public:
    using Error::Error;
};

/// An iterative solver exhausted its iteration budget.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, long iterations)
        : Error(what + " (iterations: " + std::to_string(iterations) + ")"), iterations_(iterations) {}
    long iterations() const noexcept { return iterations_; }

private:
    long iterations_;
};

}  // namespace mccs
