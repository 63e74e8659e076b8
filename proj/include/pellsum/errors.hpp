#pragma once

#include <stdexcept>
#include <string>

namespace pellsum {

// Precondition violations: bad numeric ranges, malformed arguments.
class RangeError : public std::invalid_argument {
public:
    explicit RangeError(const std::string& what) : std::invalid_argument(what) {}
};

// A perfect square was passed where a nonsquare discriminant is required.
class SquareInputError : public RangeError {
public:
    explicit SquareInputError(const std::string& what) : RangeError(what) {}
};

class NotCoprimeError : public RangeError {
public:
    explicit NotCoprimeError(const std::string& what) : RangeError(what) {}
};

class NotPrimeError : public RangeError {
public:
    explicit NotPrimeError(const std::string& what) : RangeError(what) {}
};

class NotDivisorError : public RangeError {
public:
    explicit NotDivisorError(const std::string& what) : RangeError(what) {}
};

// An enumeration or sieve would exceed the configured operation budget.
class BudgetExceededError : public std::runtime_error {
public:
    explicit BudgetExceededError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace pellsum
