#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pitch2d {

// Base class for all pitch2d errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unusable configuration or option values (CLI exit code 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Syntactically malformed input; carries a 1-based line number when the
// source is line-delimited (CLI exit code 2).
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what) {}
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  [[nodiscard]] std::size_t line() const { return line_; }

 private:
  std::size_t line_ = 0;
};

// Well-formed input that violates a documented invariant (CLI exit code 2).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Degenerate geometry, singular systems, points at infinity and other
// numerical failures (CLI exit code 3).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace pitch2d
