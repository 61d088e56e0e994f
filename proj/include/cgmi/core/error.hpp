#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cgmi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line number when known (0 otherwise).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Invalid configuration or unusable inputs (empty vocabulary, bad shapes, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Mathematical precondition violated (support mismatch, absolute continuity, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Optimization produced a non-finite loss.
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace cgmi
