#pragma once

#include <stdexcept>
#include <string>

namespace fraclab {

/// Base of every error raised by the library. `module()` names the raising module
/// so that CLI reports can attribute failures.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& what)
        : std::runtime_error(what), module_(std::move(module)) {}
    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

/// Argument outside the documented domain of an operation.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Evaluation point outside the represented region (e.g. r > r_max).
class RangeError : public Error {
public:
    using Error::Error;
};

/// Invalid geometric data at model construction.
class ConstructionError : public Error {
public:
    using Error::Error;
};

/// Grid too coarse for the requested evaluation.
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// Numerical failure inside an operator (eigensolver, linear solve).
class OperatorError : public Error {
public:
    OperatorError(const std::string& what, double residual)
        : Error("operator", what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Integral diverges under the requested exponents.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// Exponents outside the subcritical range where the lifespan formula applies.
class SupercriticalError : public Error {
public:
    using Error::Error;
};

/// Not enough samples for the requested post-processing.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent configuration.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("cli", what) {}
};

}  // namespace fraclab
