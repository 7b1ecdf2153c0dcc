#pragma once

#include <stdexcept>
#include <string>

namespace sflow {

// Error taxonomy shared by every module. All derive from std::exception
// through the standard hierarchy so callers can catch broadly.

/// Precondition violated by the caller (bad sizes, n = 0, negative time, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input is well formed but outside what the numerical methods support
/// (e.g. a non-primitive transition matrix handed to the pressure code).
class UnsupportedInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iteration failed to converge or a quadrature degenerated.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exhaustive enumeration would exceed the configured budget.
class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Text input could not be parsed. Carries the offending file and line.
class ParseError : public InvalidArgument {
 public:
  ParseError(const std::string& file, int line, const std::string& what)
      : InvalidArgument(file + ":" + std::to_string(line) + ": " + what),
        file_(file),
        line_(line) {}

  const std::string& file() const noexcept { return file_; }
  int line() const noexcept { return line_; }

 private:
  std::string file_;
  int line_;
};

}  // namespace sflow
