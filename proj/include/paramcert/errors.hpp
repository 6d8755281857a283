#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace paramcert {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mismatched registries, zero denominators and other misuse of the algebra layer.
struct StructuralError : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
        line(line),
        column(column) {}

  std::size_t line;
  std::size_t column;
};

// Undeclared or duplicate symbols in a model.
struct SemanticError : Error {
  using Error::Error;
};

// Transcendental functions and other constructs outside the rational class.
struct UnsupportedExpression : Error {
  using Error::Error;
};

struct DataError : Error {
  using Error::Error;
};

struct OrderSelectionError : Error {
  using Error::Error;
};

// Reciprocal differences of a Thiele fraction hit a zero divisor.
struct ThieleBreakdown : Error {
  using Error::Error;
};

struct PoleError : Error {
  using Error::Error;
};

struct Timeout : Error {
  using Error::Error;
};

}  // namespace paramcert
