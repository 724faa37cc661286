#pragma once
#include <stdexcept>
#include <string>

namespace fraclab {

// Precondition violations: bad parameters, incompatible sizes, malformed config.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidOrder : UsageError {
    using UsageError::UsageError;
};
struct InvalidHurst : UsageError {
    using UsageError::UsageError;
};
struct LengthMismatch : UsageError {
    using UsageError::UsageError;
};
struct TableTooShort : UsageError {
    using UsageError::UsageError;
};
struct ZeroLeadingCoefficient : UsageError {
    using UsageError::UsageError;
};
struct GridMismatch : UsageError {
    using UsageError::UsageError;
};
struct ModeMismatch : UsageError {
    using UsageError::UsageError;
};
struct ConfigError : UsageError {
    using UsageError::UsageError;
};

// Runtime numerical failures.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotConverged : NumericalError {
    using NumericalError::NumericalError;
};
struct StabilityViolation : NumericalError {
    using NumericalError::NumericalError;
};
struct NewtonDiverged : NumericalError {
    using NumericalError::NumericalError;
};
struct EmbeddingFailure : NumericalError {
    using NumericalError::NumericalError;
};
struct ProxFailure : NumericalError {
    using NumericalError::NumericalError;
};

} // namespace fraclab
