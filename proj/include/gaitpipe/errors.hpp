#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gaitpipe {

// Input could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input file violates its schema. `line()` is 1-based, 0 when not line-bound.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class NonMonotonicTimeError : public FormatError {
 public:
  using FormatError::FormatError;
};

// Rejected parameter set (config file, flags, scene spec).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical precondition failed (e.g. ICC on fewer than two subjects).
class DegenerateInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace gaitpipe
