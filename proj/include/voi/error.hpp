#pragma once

#include <stdexcept>
#include <string>

namespace voi {

/// Base class of every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user configuration (bounds, counts, unknown keys).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Caller broke a precondition (length mismatch, probability out of [0,1]).
class ContractError : public Error {
public:
    using Error::Error;
};

/// A ratio metric whose denominator vanishes (lambda with no intrinsic cost, chi at lambda = 1).
class UndefinedRatioError : public Error {
public:
    using Error::Error;
};

/// Convergence diagnostic cannot be computed for the given draws.
class DiagnosticUnavailableError : public Error {
public:
    using Error::Error;
};

/// Sampler could not find a finite starting point.
class InitializationError : public Error {
public:
    using Error::Error;
};

/// Too many realizations were excluded by the convergence gate.
class DiagnosticsGateError : public Error {
public:
    using Error::Error;
};

/// Singular least-squares design.
class SingularDesignError : public Error {
public:
    using Error::Error;
};

template <class E = ContractError>
inline void require(bool condition, const std::string& message) {
    if (!condition) {
        throw E(message);
    }
}

}  // namespace voi
