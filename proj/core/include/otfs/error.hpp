#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace otfs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes or lengths do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A value violates a documented invariant (grid, profile, pattern).
class InvariantError : public Error {
 public:
  InvariantError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A factorization or inversion broke down. `index()` is the elimination
/// step (for a single matrix) or the block index t (for block-circulant
/// inversion), zero-based.
class SingularMatrixError : public Error {
 public:
  SingularMatrixError(std::size_t index, const std::string& message)
      : Error(message), index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Refusal to materialize a dense operator above the configured size.
class SizeGuardError : public Error {
 public:
  SizeGuardError(std::size_t requested, std::size_t limit)
      : Error("dense materialization of dimension " + std::to_string(requested) +
              " exceeds the limit NM <= " + std::to_string(limit)),
        requested_(requested),
        limit_(limit) {}

  std::size_t requested() const noexcept { return requested_; }
  std::size_t limit() const noexcept { return limit_; }

 private:
  std::size_t requested_;
  std::size_t limit_;
};

/// Configuration text could not be parsed or validated.
class ConfigError : public Error {
 public:
  ConfigError(int line, std::string field, const std::string& message)
      : Error(format(line, field, message)), line_(line), field_(std::move(field)) {}

  /// 1-based line number, or 0 when the error is not tied to a line.
  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  static std::string format(int line, const std::string& field, const std::string& message) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    if (!field.empty()) out += field + ": ";
    return out + message;
  }

  int line_;
  std::string field_;
};

}  // namespace otfs
