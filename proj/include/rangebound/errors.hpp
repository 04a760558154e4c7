#pragma once

#include <stdexcept>
#include <string>

namespace rangebound {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument violates a documented precondition or invariant.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The requested coupling or construction does not exist for the given marginals.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// Malformed serialized input.
class ParseError : public Error {
public:
    using Error::Error;
};

/// An iterative method stopped before meeting its tolerance.
///
/// The best iterate found so far is kept so callers can report it.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double best_c, double best_lambda, double residual)
        : Error(what), best_c_(best_c), best_lambda_(best_lambda), residual_(residual) {}

    double best_c() const noexcept { return best_c_; }
    double best_lambda() const noexcept { return best_lambda_; }
    double residual() const noexcept { return residual_; }

private:
    double best_c_;
    double best_lambda_;
    double residual_;
};

}  // namespace rangebound
