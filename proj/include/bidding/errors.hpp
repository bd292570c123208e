#pragma once

#include <stdexcept>
#include <string>

namespace bidding {

/// Raised when an input violates a documented precondition or invariant.
/// The CLI maps this to exit code 1.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when an iterative solver fails to converge within its cap.
/// The CLI maps this to exit code 2.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
          residual_(residual) {}

    double residual() const { return residual_; }

private:
    double residual_;
};

/// Raised when exact rational arithmetic would exceed 128-bit intermediates.
class RationalOverflow : public std::overflow_error {
public:
    explicit RationalOverflow(const std::string& what) : std::overflow_error(what) {}
};

} // namespace bidding
