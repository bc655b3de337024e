#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace magnoise {

/// Input violates a documented precondition or invariant. CLI exit code 3.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Text input could not be parsed; carries the 1-based line number.
class ParseError : public ValidationError {
public:
    ParseError(const std::string& msg, std::size_t line)
        : ValidationError(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A spectral density of the wrong kind was passed to an operation.
class KindError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A numerical routine failed to converge; carries the partial result. CLI exit code 4.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& msg, double partial, double error_estimate)
        : std::runtime_error(msg), partial_(partial), error_estimate_(error_estimate) {}
    double partial() const noexcept { return partial_; }
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double partial_;
    double error_estimate_;
};

} // namespace magnoise
