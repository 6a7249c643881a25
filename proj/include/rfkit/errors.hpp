#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rfkit {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A value or parameter set that violates a documented invariant.
// The message names the offending parameter where one exists.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(what) {}
};

// Text input that could not be parsed. line() is 1-based, 0 means unknown.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Linear-algebra failure; carries a condition-number estimate when known.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what, double condition = 0.0)
        : Error(what), condition_(condition) {}
    double condition_estimate() const { return condition_; }

private:
    double condition_;
};

}  // namespace rfkit
