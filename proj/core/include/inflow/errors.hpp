#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace inflow {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or configuration value.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Geometry that cannot be meshed (e.g. a bump closing the channel).
class DegenerateDomainError : public Error {
 public:
  using Error::Error;
};

/// A documented invariant of an input object does not hold.
class InvariantError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Linear solver breakdown.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace inflow
