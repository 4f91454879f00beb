#pragma once

#include <stdexcept>
#include <string>

namespace aggr {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on user-supplied values was violated.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A state lacks a component that an operation requires.
class ComponentError : public Error {
public:
    using Error::Error;
};

/// The requested (model, mode, component) combination is not supported.
class CapabilityError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class SingularityError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

/// Malformed text input. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace aggr

namespace aggr {

/// An input is outside the representable family (e.g. a non-polynomial `a`).
class UnsupportedFormError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

} // namespace aggr

namespace aggr {

/// Too few quadrature nodes for a replication integral.
class InsufficientGridError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

} // namespace aggr
