#pragma once

#include <stdexcept>
#include <string>

namespace c2lab {

enum class ErrorKind {
  Syntax,
  UnknownPredicate,
  ArityMismatch,
  UnknownObject,
  InvalidInput,
  UnsupportedArity,
  TwoVariableViolation,
  UnboundVariable,
  MixedInputs,
  NotFound,
  ResourceCap,
  Divergence,
  ShapeMismatch,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so the
/// C API can map it to a stable status code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Syntax error with a 1-based source position.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, std::size_t line, std::size_t column)
      : Error(ErrorKind::Syntax, format(message, line, column)),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& message, std::size_t line, std::size_t column) {
    return "syntax error at " + std::to_string(line) + ":" + std::to_string(column) + ": " + message;
  }

  std::size_t line_;
  std::size_t column_;
};

}  // namespace c2lab
