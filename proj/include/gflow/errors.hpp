#pragma once

#include <stdexcept>
#include <string>

namespace gflow {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
struct InvalidArgument : Error {
    using Error::Error;
};

/// Two grid objects that must share a grid do not.
struct GridMismatch : Error {
    using Error::Error;
};

/// The quantile is ambiguous: s hit a flat CDF value over an interior zero plateau.
struct UndefinedQuantile : Error {
    using Error::Error;
};

/// An iterative solver exhausted its iteration budget.
struct Nonconvergence : Error {
    double last_error;
    Nonconvergence(const std::string& msg, double err) : Error(msg), last_error(err) {}
};

/// Log-domain scaling potentials exceeded the configured bound
/// (the kernel is too narrow for the grid).
struct PotentialOverflow : Error {
    using Error::Error;
};

/// A Newton step could not be damped into the strictly monotone region.
struct MonotonicityViolation : Error {
    using Error::Error;
};

/// A configuration value is missing, malformed or out of range.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace gflow
