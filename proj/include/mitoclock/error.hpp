#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mitoclock {

// Base for every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Bad user input: out-of-range parameters, malformed tables, wrong sizes.
class ValidationError : public Error {
public:
  using Error::Error;
};

class ParseError : public ValidationError {
public:
  ParseError(std::size_t line, const std::string& what)
      : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

// Operation applied to a value in the wrong state (e.g. reweighting raw counts).
class StateError : public Error {
public:
  using Error::Error;
};

// Input is well formed but carries no information (all-zero histogram, ...).
class DegenerateInputError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class UnsupportedVariantError : public Error {
public:
  using Error::Error;
};

// A numerical procedure could not produce a trustworthy answer.
class NumericalError : public Error {
public:
  using Error::Error;
};

} // namespace mitoclock
