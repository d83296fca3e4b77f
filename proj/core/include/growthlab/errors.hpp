#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace growthlab {

/// Division by zero and other undefined field operations.
class ArithmeticError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed polynomial or element text. `offset` is the byte position of
/// the offending character in the input.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class ArityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input lacks the dependence an operation presupposes (constant polynomial,
/// constant probe, polynomial independent of a variable block).
class DegenerateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace growthlab
