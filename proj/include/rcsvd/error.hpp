#pragma once

#include <stdexcept>
#include <string>

namespace rcsvd {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dimension mismatch or out-of-range size argument.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// An input violates a documented precondition (rank, range of a parameter).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// An iterative kernel did not reach its tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Malformed or unreadable file content.
class FormatError : public Error {
public:
    using Error::Error;
};

/// File system failure (missing file, unwritable path).
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace rcsvd
