#pragma once

#include <cstdint>
#include <string>
#include <variant>

namespace dbfuzz::sql {

enum class Affinity { integer, real, text };

std::string_view to_string(Affinity affinity);

struct Value {
  std::variant<std::monostate, std::int64_t, double, std::string> data;

  Value() = default;
  Value(std::int64_t v) : data(v) {}
  Value(double v) : data(v) {}
  Value(std::string v) : data(std::move(v)) {}

  bool is_null() const { return std::holds_alternative<std::monostate>(data); }
  bool is_integer() const { return std::holds_alternative<std::int64_t>(data); }
  bool is_real() const { return std::holds_alternative<double>(data); }
  bool is_text() const { return std::holds_alternative<std::string>(data); }
  bool is_numeric() const { return is_integer() || is_real(); }

  std::int64_t as_integer() const { return std::get<std::int64_t>(data); }
  double as_real() const { return is_integer() ? static_cast<double>(as_integer()) : std::get<double>(data); }
  const std::string& as_text() const { return std::get<std::string>(data); }

  /// NULL, 42, 1.5, 'text' (quotes doubled).
  std::string render() const;
  friend bool operator==(const Value&, const Value&) = default;
};

}  // namespace dbfuzz::sql
