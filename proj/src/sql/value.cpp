#include "dbfuzz/sql/value.hpp"

#include <charconv>

namespace dbfuzz::sql {

std::string_view to_string(Affinity affinity) {
  switch (affinity) {
    case Affinity::integer: return "INT";
    case Affinity::real: return "REAL";
    case Affinity::text: return "TEXT";
  }
  return "INT";
}

std::string Value::render() const {
  if (is_null()) return "NULL";
  if (is_integer()) return std::to_string(as_integer());
  if (is_real()) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), std::get<double>(data));
    std::string out(buf, ec == std::errc{} ? end : buf);
    if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
    return out;
  }
  std::string out = "'";
  for (char c : as_text()) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

}  // namespace dbfuzz::sql
