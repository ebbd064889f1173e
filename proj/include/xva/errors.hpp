#pragma once

#include <stdexcept>
#include <string>

namespace xva {

// Base of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (t > T, s < t, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Malformed input: non-finite numbers, negative volatility, bad payoff knots.
class InvalidInput : public Error {
public:
    using Error::Error;
};

// The operation is valid only under a rate/model regime that does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// A numerical method failed to converge or exceeded a configured bound.
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace xva
