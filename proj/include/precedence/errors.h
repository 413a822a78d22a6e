#ifndef PRECEDENCE_ERRORS_H_
#define PRECEDENCE_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace precedence {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed textual input. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
  explicit ParseError(const std::string& message) : Error(message) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_ = 0;
};

// Well-formed input whose structure is inconsistent (dangling heads,
// unreachable tokens, ...).
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Input that parses but violates a domain contract (unknown label, span out
// of bounds, unresolvable reference).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// API misuse, e.g. vectorizing with an index that was never frozen.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Invalid model or run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Non-finite values during training.
class NumericError : public Error {
 public:
  using Error::Error;
};

// File system failures.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace precedence

#endif  // PRECEDENCE_ERRORS_H_
