#pragma once

#include <stdexcept>
#include <string>

namespace hyplqr {

// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Argument outside the mathematical domain of a formula (e.g. density > rho_M).
class DomainError : public Error {
public:
    using Error::Error;
};

// Pole of the Arrhenius factor, theta_1 = -1.
class SingularityError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double last_residual)
        : Error(what), last_residual_(last_residual) {}
    [[nodiscard]] double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, double time) : Error(what), time_(time) {}
    [[nodiscard]] double time() const noexcept { return time_; }

private:
    double time_;
};

class CflError : public Error {
public:
    CflError(const std::string& what, double time, double bound)
        : Error(what), time_(time), bound_(bound) {}
    [[nodiscard]] double time() const noexcept { return time_; }
    [[nodiscard]] double bound() const noexcept { return bound_; }

private:
    double time_;
    double bound_;
};

// QR iteration failed to converge, or a factorization broke down.
class NumericalError : public Error {
public:
    using Error::Error;
};

// Lyapunov/Sylvester operator is singular (A and -A share an eigenvalue).
class SingularEquationError : public Error {
public:
    using Error::Error;
};

// No stabilizing CARE solution (no n-dimensional stable invariant subspace).
class SynthesisError : public Error {
public:
    using Error::Error;
};

class OracleError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace hyplqr
