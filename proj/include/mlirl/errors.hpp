#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mlirl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shapes of two arguments disagree, or an index is out of range.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A constructed object violates one of its invariants.
class InvariantError : public Error {
public:
    using Error::Error;
};

/// Bad user-facing configuration (unknown keys, names, out-of-range values).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Lookup by name failed.
class NotFoundError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// An iterative solver hit its iteration cap.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double last_residual, std::size_t iterations)
        : Error(what + " (residual " + std::to_string(last_residual) + " after " +
                std::to_string(iterations) + " iterations)"),
          last_residual_(last_residual),
          iterations_(iterations) {}

    double last_residual() const noexcept { return last_residual_; }
    std::size_t iterations() const noexcept { return iterations_; }

    /// Same error with `prefix` prepended to the message.
    ConvergenceError with_context(const std::string& prefix) const {
        return ConvergenceError(prefix + what(), last_residual_, iterations_, Raw{});
    }

private:
    struct Raw {};
    ConvergenceError(const std::string& message, double last_residual, std::size_t iterations, Raw)
        : Error(message), last_residual_(last_residual), iterations_(iterations) {}

    double last_residual_;
    std::size_t iterations_;
};

/// Rethrows the in-flight mlirl error with `prefix` prepended, keeping its category.
[[noreturn]] void rethrow_with_context(const std::string& prefix);

/// A direct linear solve failed or produced an unacceptable residual.
class SolverError : public Error {
public:
    using Error::Error;
};

/// Reading or writing a file failed.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace mlirl
