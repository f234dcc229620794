#pragma once

#include <stdexcept>

namespace altq {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid model, scenario, or argument. Maps to CLI exit code 2.
struct ValidationError : Error {
    using Error::Error;
};

// The simulator cannot sample the requested distribution family.
struct CapabilityError : ValidationError {
    using ValidationError::ValidationError;
};

// A correlation is undefined for a degenerate model.
struct UndefinedCorrelationError : ValidationError {
    using ValidationError::ValidationError;
};

// Evaluation outside the domain of an operation.
struct DomainError : ValidationError {
    using ValidationError::ValidationError;
};

// Singular system, non-convergent iteration, or a failed numerical
// consistency check. Maps to CLI exit code 3.
struct NumericalError : Error {
    using Error::Error;
};

// A computed solution violates its own invariants.
struct SolutionRejectedError : NumericalError {
    using NumericalError::NumericalError;
};

}  // namespace altq
