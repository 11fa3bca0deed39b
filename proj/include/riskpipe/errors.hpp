#pragma once

#include <stdexcept>
#include <string>

namespace riskpipe {

// Base class for every pipeline failure. Subtypes mirror the distinct
// failure modes callers are expected to branch on.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file: missing required headers, bad layout.
class SchemaError : public Error {
public:
    using Error::Error;
};

// Data violates a structural invariant (duplicate dates, name collisions).
class IntegrityError : public Error {
public:
    using Error::Error;
};

// A value is outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// Empty or all-missing input where content is required.
class EmptyInputError : public Error {
public:
    using Error::Error;
};

// Column or asset name not found.
class LookupError : public Error {
public:
    using Error::Error;
};

// Invalid parameter value (window < 2, N out of range, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

// Design matrix singular or regressor constant.
class CollinearityError : public Error {
public:
    using Error::Error;
};

// Not enough observations for the requested fit.
class SampleSizeError : public Error {
public:
    using Error::Error;
};

// Zero-variance input where dispersion is required.
class DegenerateVarianceError : public Error {
public:
    using Error::Error;
};

// Iterative optimizer exhausted its budget without converging.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

// Matrix factorization failed (e.g. Cholesky of a non-PD covariance).
class FactorizationError : public Error {
public:
    using Error::Error;
};

// Matrix dimensions do not match the model.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Evaluation protocol violated (empty validation split, single-class labels).
class ProtocolError : public Error {
public:
    using Error::Error;
};

}  // namespace riskpipe
