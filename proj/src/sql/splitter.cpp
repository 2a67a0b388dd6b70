#include "dbfuzz/sql/splitter.hpp"

#include "dbfuzz/common/text.hpp"

namespace dbfuzz::sql {

std::vector<std::string> split_statements(std::string_view script) {
  std::vector<std::string> out;
  std::size_t start = 0;
  int depth = 0;
  std::size_t i = 0;
  const std::size_t n = script.size();
  auto flush = [&](std::size_t end) {
    const auto piece = trim(script.substr(start, end - start));
    if (!piece.empty()) out.emplace_back(piece);
  };
  while (i < n) {
    const char c = script[i];
    if (c == '-' && i + 1 < n && script[i + 1] == '-') {
      while (i < n && script[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && script[i + 1] == '*') {
      const auto close = script.find("*/", i + 2);
      i = close == std::string_view::npos ? n : close + 2;
      continue;
    }
    if (c == '\'' || c == '"') {
      ++i;
      while (i < n) {
        if (script[i] == c) {
          if (i + 1 < n && script[i + 1] == c) {
            i += 2;
            continue;
          }
          break;
        }
        ++i;
      }
      ++i;
      continue;
    }
    if (c == '(') ++depth;
    if (c == ')' && depth > 0) --depth;
    if (c == ';' && depth == 0) {
      flush(i);
      start = i + 1;
    }
    ++i;
  }
  if (start < n) flush(n);
  return out;
}

bool ends_in_line_comment(std::string_view statement) {
  // Walk the statement with the same quoting rules as the splitter and record
  // whether the final byte sits inside a line comment.
  bool in_comment = false;
  std::size_t i = 0;
  const std::size_t n = statement.size();
  while (i < n) {
    const char c = statement[i];
    in_comment = false;
    if (c == '-' && i + 1 < n && statement[i + 1] == '-') {
      while (i < n && statement[i] != '\n') ++i;
      in_comment = i == n;
      continue;
    }
    if (c == '/' && i + 1 < n && statement[i + 1] == '*') {
      const auto close = statement.find("*/", i + 2);
      i = close == std::string_view::npos ? n : close + 2;
      continue;
    }
    if (c == '\'' || c == '"') {
      ++i;
      while (i < n) {
        if (statement[i] == c) {
          if (i + 1 < n && statement[i + 1] == c) {
            i += 2;
            continue;
          }
          break;
        }
        ++i;
      }
      ++i;
      continue;
    }
    ++i;
  }
  return in_comment;
}

std::string terminate_statement(std::string_view statement) {
  std::string out(statement);
  out += ends_in_line_comment(statement) ? "\n;" : ";";
  return out;
}

}  // namespace dbfuzz::sql
