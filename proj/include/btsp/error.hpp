#pragma once

#include <stdexcept>
#include <string>

namespace btsp {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside an operation's domain (n < 3, negative weight in beta mode, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Oracle hard guards; these exist so brute force never silently runs forever.
class CapacityError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// A structural property that the algorithm guarantees did not hold. Always a bug
// or malformed input handed to an internal stage.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace btsp
