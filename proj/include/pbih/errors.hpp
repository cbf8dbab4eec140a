#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pbih {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed formula text. `position` is the 0-based character offset.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& message)
      : Error("parse error at position " + std::to_string(position) + ": " + message),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class UnboundVariableError : public Error {
 public:
  explicit UnboundVariableError(std::vector<std::string> names)
      : Error(describe(names)), names_(std::move(names)) {}

  const std::vector<std::string>& names() const noexcept { return names_; }

 private:
  static std::string describe(const std::vector<std::string>& names) {
    std::string out = "unbound variable(s):";
    for (const auto& n : names) out += " " + n;
    return out;
  }
  std::vector<std::string> names_;
};

/// ln/sqrt of a non-positive value, division by zero, non-finite result.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Chart point where the immersion fails to be an immersion.
class DegenerateChartError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its mathematical preconditions
/// (non-minimal base, non-constant conformal data, unvalidated ambient...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(std::size_t line, const std::string& message)
      : Error(line == 0 ? message : "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace pbih
