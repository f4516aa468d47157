#pragma once

#include <stdexcept>
#include <string>

namespace rideq {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
    using Error::Error;
};

// Requested demand exceeds the feasibility peak of the conservation curve;
// no stationary state exists.
struct InfeasibleDemand : Error {
    using Error::Error;
};

// Operation requires the normal (uncongested) regime but the point is WGC.
struct RegimeError : Error {
    using Error::Error;
};

// No equilibrium exists under the stated regime restrictions.
struct NoEquilibrium : Error {
    using Error::Error;
};

// Iterative solver failed to converge; message carries the residual trace.
struct ConvergenceFailure : Error {
    using Error::Error;
};

// Commission thresholds came out inverted (tau_1 > tau_2).
struct DegenerateRange : Error {
    using Error::Error;
};

// Grid oracle asked for more dimensions than supported.
struct DimensionError : Error {
    using Error::Error;
};

// Config failed schema or invariant validation.
struct ValidationError : Error {
    using Error::Error;
};

// Config file failed to parse.
struct ParseError : ValidationError {
    using ValidationError::ValidationError;
};

// File output failure.
struct IoError : Error {
    using Error::Error;
};

} // namespace rideq
