#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace darbouxkit {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Precondition or malformed-argument failure (bad template, zero divisor, ...).
struct InvalidArgument : Error {
  using Error::Error;
};

enum class ParseErrorKind { syntax, unknown_identifier, non_polynomial };

struct ParseError : Error {
  ParseError(ParseErrorKind kind, std::size_t position, const std::string& what)
      : Error(what + " (at offset " + std::to_string(position) + ")"),
        kind(kind), position(position), detail(what) {}
  ParseErrorKind kind;
  std::size_t position;
  std::string detail;
};

/// A numeric evaluation left the real domain of a closed-form integral.
struct DomainError : Error {
  DomainError(std::string condition, const std::string& what)
      : Error(what), condition(std::move(condition)) {}
  std::string condition;
};

/// Integral evaluated with parameters outside its hypotheses.
struct ConstraintError : Error {
  using Error::Error;
};

}  // namespace darbouxkit
