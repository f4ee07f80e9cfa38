#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace eztree {

/// Base of every error the library raises.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value violates a domain invariant (bad parameter, bad path, bad config).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Scenario text could not be parsed. Carries the 1-based line number.
class ParseError : public ValidationError {
public:
    ParseError(std::size_t line, const std::string& what)
        : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// The expected-utility derivative was requested with gamma != rho.
class ModelMismatch : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class LengthMismatch : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A finite diff step straddles rho = 1.
class StepCrossesSingularity : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// h >= 1: no finite positive price-dividend ratio exists.
class NoEquilibrium : public Error {
public:
    using Error::Error;
};

/// An Euler integrand became non-finite. Carries the offending draw index.
class NumericalOverflow : public Error {
public:
    NumericalOverflow(std::size_t draw, const std::string& what)
        : Error("draw " + std::to_string(draw) + ": " + what), draw_(draw) {}

    std::size_t draw() const noexcept { return draw_; }

private:
    std::size_t draw_;
};

class BracketingFailure : public Error {
public:
    using Error::Error;
};

}  // namespace eztree
