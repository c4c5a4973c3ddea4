#pragma once

#include <stdexcept>
#include <string>

namespace tfgamma {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: malformed configuration, violated preconditions. The CLI maps these to exit code 2.
class ValidationError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class UnsupportedDimension : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Problem too large for a dense diagnostic (e.g. exchange term above its particle cap).
class SizeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A numerical procedure failed to reach its target. The CLI maps these to exit code 3.
class NumericError : public Error {
public:
    using Error::Error;
};

class ToleranceNotMet : public NumericError {
public:
    ToleranceNotMet(const std::string& what, double achieved)
        : NumericError(what), achieved_(achieved) {}
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

class NonConvergence : public NumericError {
public:
    NonConvergence(const std::string& what, double residual)
        : NumericError(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class AllocationError : public NumericError {
public:
    using NumericError::NumericError;
};

class ConstraintInfeasible : public NumericError {
public:
    using NumericError::NumericError;
};

class ShootingError : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace tfgamma
