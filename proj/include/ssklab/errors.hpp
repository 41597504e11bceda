#pragma once

#include <stdexcept>
#include <string>

namespace ssklab {

// Bad input: malformed specs, out-of-domain arguments, regime mismatches.
// The CLI maps these to exit code 1.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

class DomainError : public ValidationError {
public:
    explicit DomainError(const std::string& what) : ValidationError(what) {}
};

// Raised when a high-temperature quantity is requested at or above beta_c.
class RegimeError : public ValidationError {
public:
    explicit RegimeError(const std::string& what) : ValidationError(what) {}
};

// Numerical procedure failed (quadrature did not converge, etc.). Exit code 2.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ssklab
