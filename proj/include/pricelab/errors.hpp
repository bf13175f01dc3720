#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pricelab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation
/// (non-positive spot, strike, volatility, maturity, log of a non-positive number...).
class DomainError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Option price outside the static no-arbitrage band, so no implied volatility exists.
class NoArbitrageViolation : public DomainError {
public:
    using DomainError::DomainError;
};

class NoConvergence : public Error {
public:
    using Error::Error;
};

class NoAtmPairs : public Error {
public:
    using Error::Error;
};

/// All sample points are collinear; a 2-D triangulation does not exist.
class DegenerateGeometry : public Error {
public:
    using Error::Error;
};

class NumericalUnderflow : public Error {
public:
    using Error::Error;
};

class DegenerateDispersion : public Error {
public:
    using Error::Error;
};

/// Variance-Gamma parameters outside theta + sigma^2/2 < alpha (or sigma, alpha <= 0).
class DomainViolation : public DomainError {
public:
    using DomainError::DomainError;
};

class QuadratureFailure : public Error {
public:
    using Error::Error;
};

class CalibrationFailure : public Error {
public:
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

}  // namespace pricelab
