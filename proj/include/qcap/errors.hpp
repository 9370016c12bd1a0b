#pragma once

#include <stdexcept>
#include <string>

namespace qcap {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed parameter expression. `position` is the 0-based character offset.
class ExprError : public Error {
public:
    ExprError(const std::string& what, std::size_t position)
        : Error(what + " (at position " + std::to_string(position) + ")"), position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Malformed geometry document or geometry that violates its invariants.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Assembly or factorization failure.
class SolveError : public Error {
public:
    using Error::Error;
};

/// Field kernel evaluated at an element endpoint, where it is not integrable.
class SingularKernelError : public Error {
public:
    using Error::Error;
};

/// Quadrature did not reach the requested tolerance.
class QuadratureError : public Error {
public:
    using Error::Error;
};

} // namespace qcap
