#pragma once

#include <stdexcept>
#include <string>

namespace thetalab {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input rejected before any numerical work: bad shapes, out-of-range
/// parameters, unreadable files.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Argument outside the domain of a function, e.g. Re z <= 0 or a pole of z/sin z.
class DomainError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A numerical procedure failed: eigensolver or SVD did not converge,
/// quadrature did not settle.
class NumericalError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void require(bool ok, const std::string& what)
{
    if (!ok) throw ValidationError(what);
}

} // namespace detail
} // namespace thetalab
