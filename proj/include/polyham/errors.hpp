#pragma once

#include <stdexcept>
#include <string>

namespace polyham {

// Exception hierarchy. The CLI maps each kind onto a distinct exit code.

/// Malformed or inconsistent input data (dimension mismatch, bad file).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parse failure at a specific line of an input stream.
class ParseError : public InputError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Parameters outside the documented domain of an operation.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An expansion or matrix product would exceed its configured monomial budget.
class BudgetError : public std::runtime_error {
 public:
  BudgetError(const std::string& what, double projected)
      : std::runtime_error(what + " (projected " + format(projected) + " monomials)"),
        projected_(projected) {}
  double projected() const noexcept { return projected_; }

 private:
  static std::string format(double v);
  double projected_;
};

/// An operation that needs both colors (or a nonempty database) got an empty side.
class EmptyInputError : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace polyham
