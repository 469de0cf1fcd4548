#pragma once

#include <stdexcept>
#include <string>

namespace dlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation
/// (negative density, alpha <= 0, lambda outside [0,1], ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Two discretizations (grids, partitions, snapshot times) do not match.
class IncompatibleError : public Error {
 public:
  using Error::Error;
};

/// A block with vanishing mean density carries nonzero mean momentum.
class InadmissibleBlockError : public Error {
 public:
  using Error::Error;
};

/// The kinetic constraint cannot be met for the requested density.
class InfeasibleConstraintError : public Error {
 public:
  using Error::Error;
};

/// A stage of the time integrator produced negative density; the caller is
/// expected to retry with a smaller step.
class TimestepRejection : public Error {
 public:
  using Error::Error;
};

/// Repeated step rejections drove dt below the configured minimum.
class SolverStallError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration text. Line and column are 1-based.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, int line, int column)
      : Error(message + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

/// File-system or serialization failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dlab
