#pragma once

#include <stdexcept>
#include <string>

namespace orhc {

/// Input text or a structure handed to an operation does not parse or violates
/// its own invariants (repeated vertex, length mismatch, duplicate edge...).
class MalformedInput : public std::runtime_error {
 public:
  explicit MalformedInput(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// An exact oracle was asked to run above its hard size cap.
class CapExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Configuration value outside its admissible range.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace orhc
