#pragma once

#include <stdexcept>
#include <string>

namespace symmap {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shapes or dimensions do not fit together.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A documented precondition on the input does not hold (non-Hermitian input,
/// invalid state, out-of-range parameter).
class ContractError : public Error {
public:
    using Error::Error;
};

/// An iterative routine failed to converge.
class NumericError : public Error {
public:
    NumericError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// A constructed object fails one of its certification checks.
class CertificationError : public Error {
public:
    using Error::Error;
};

} // namespace symmap
