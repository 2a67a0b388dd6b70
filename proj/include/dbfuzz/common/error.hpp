#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dbfuzz {

/// Base class for every error raised by the framework.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration document is missing a field or holds an invalid value.
/// `field()` is a dotted path such as `llm.provider`.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Caller broke a documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A structured document failed to parse. Line is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::string field, const std::string& message)
      : Error(describe(line, field, message)), line_(line), field_(std::move(field)) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  static std::string describe(std::size_t line, const std::string& field, const std::string& message) {
    std::string out;
    if (line != 0) out += "line " + std::to_string(line) + ": ";
    if (!field.empty()) out += field + ": ";
    return out + message;
  }
  std::size_t line_;
  std::string field_;
};

/// The executor behind an executor handle cannot be reached.
class ExecutorUnavailable : public Error {
 public:
  using Error::Error;
};

/// A named object (bug report, pattern, entry) does not exist.
class NotFound : public Error {
 public:
  using Error::Error;
};

}  // namespace dbfuzz
