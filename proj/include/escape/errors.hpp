#pragma once

#include <stdexcept>
#include <string>

namespace escape {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Geometric input with no defined answer (zero vector, coincident centers).
class DegenerateInput : public Error {
public:
    using Error::Error;
};

/// Argument outside the domain of a formula (n < 1, empty safety list, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// An implicit constant could not be solved for.
class SolverError : public Error {
public:
    using Error::Error;
};

/// The cascade shrank below what the active scalar type can resolve.
class PrecisionError : public Error {
public:
    PrecisionError(int level, const std::string& what)
        : Error("level " + std::to_string(level) + ": " + what), level_(level) {}
    int level() const noexcept { return level_; }

private:
    int level_;
};

/// Internal event ordering bug: a strategy asked for data not yet committed.
class SchedulingError : public Error {
public:
    using Error::Error;
};

/// Someone asked for lion positions in the future.
class CausalityError : public Error {
public:
    using Error::Error;
};

/// A strategy precondition that must always hold did not.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace escape
