#pragma once

#include <stdexcept>
#include <string>

namespace homsim {

/// Base class for every error raised by the simulator.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of the operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A frequency grid does not cover the feature it is asked to sample.
class CoverageError : public Error {
public:
    using Error::Error;
};

/// Inputs are individually valid but inconsistent with each other.
class ConfigurationError : public Error {
public:
    using Error::Error;
};

/// Zero-norm amplitudes and similar inputs that admit no normalization.
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

}  // namespace homsim
