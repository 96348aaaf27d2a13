#pragma once

#include <stdexcept>
#include <string>

namespace dustmie {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A recurrence or series produced a magnitude that double cannot hold.
class OverflowError : public Error {
public:
    using Error::Error;
};

/// A Mie coefficient denominator vanished (|den| < 1e-300).
class SingularDenominatorError : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature exhausted its refinement budget.
class QuadratureError : public Error {
public:
    using Error::Error;
};

/// Invalid user configuration (geometry, sweeps, missing required fields).
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace dustmie
