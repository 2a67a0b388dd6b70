#include "dbfuzz/sql/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "dbfuzz/common/text.hpp"

namespace dbfuzz::sql {

namespace {

constexpr std::array<std::string_view, 45> kKeywords = {
    "ALL",    "AND",     "AS",     "ASC",     "BETWEEN", "BY",     "CREATE",  "DELETE", "DESC",
    "DISTINCT", "DROP",  "EXISTS", "FALSE",   "FROM",    "IF",     "IN",      "INSERT", "INTO",
    "IS",     "KEY",     "LIKE",   "LIMIT",   "NOT",     "NULL",   "OFFSET",  "OR",     "ORDER",
    "PRIMARY", "SELECT", "SET",    "TABLE",   "TRUE",    "UPDATE", "VALUES",  "WHERE",  "UNIQUE",
    "DEFAULT", "GROUP",  "HAVING", "JOIN",    "ON",      "UNION",  "CHECK",   "REFERENCES", "CASE"};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_'; }
bool ident_part(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

}  // namespace

bool Token::is_word(std::string_view word) const { return kind == TokenKind::identifier && iequals(text, word); }

bool is_keyword(std::string_view word) {
  return std::any_of(kKeywords.begin(), kKeywords.end(), [&](std::string_view k) { return iequals(k, word); });
}

LexResult tokenize(std::string_view sql) {
  LexResult out;
  std::size_t i = 0;
  const std::size_t n = sql.size();
  auto fail = [&](std::string message, std::size_t at) {
    out.error = std::move(message);
    out.error_offset = at;
    out.tokens.push_back({TokenKind::end, {}, n});
    return out;
  };
  while (i < n) {
    const char c = sql[i];
    if (std::isspace(static_cast<unsigned char>(c)) != 0) {
      ++i;
      continue;
    }
    if (c == '-' && i + 1 < n && sql[i + 1] == '-') {
      while (i < n && sql[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && sql[i + 1] == '*') {
      const auto close = sql.find("*/", i + 2);
      if (close == std::string_view::npos) return fail("unterminated block comment", i);
      i = close + 2;
      continue;
    }
    const std::size_t start = i;
    if (ident_start(c)) {
      while (i < n && ident_part(sql[i])) ++i;
      out.tokens.push_back({TokenKind::identifier, sql.substr(start, i - start), start});
      continue;
    }
    if (digit(c) || (c == '.' && i + 1 < n && digit(sql[i + 1]))) {
      bool real = false;
      while (i < n && digit(sql[i])) ++i;
      if (i < n && sql[i] == '.') {
        real = true;
        ++i;
        while (i < n && digit(sql[i])) ++i;
      }
      if (i < n && (sql[i] == 'e' || sql[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < n && (sql[j] == '+' || sql[j] == '-')) ++j;
        if (j < n && digit(sql[j])) {
          real = true;
          i = j;
          while (i < n && digit(sql[i])) ++i;
        }
      }
      if (i < n && ident_start(sql[i])) return fail("malformed number", start);
      out.tokens.push_back({real ? TokenKind::real : TokenKind::integer, sql.substr(start, i - start), start});
      continue;
    }
    if (c == '\'') {
      ++i;
      bool closed = false;
      while (i < n) {
        if (sql[i] == '\'') {
          if (i + 1 < n && sql[i + 1] == '\'') {
            i += 2;
            continue;
          }
          ++i;
          closed = true;
          break;
        }
        ++i;
      }
      if (!closed) return fail("unterminated string literal", start);
      out.tokens.push_back({TokenKind::string, sql.substr(start, i - start), start});
      continue;
    }
    static constexpr std::array<std::string_view, 6> kTwoChar = {"<>", "!=", "<=", ">=", "||", "::"};
    bool matched = false;
    for (auto op : kTwoChar) {
      if (sql.substr(i, 2) == op) {
        out.tokens.push_back({TokenKind::symbol, sql.substr(i, 2), i});
        i += 2;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    static constexpr std::string_view kSingle = "(),;*+-/%=<>.";
    if (kSingle.find(c) != std::string_view::npos) {
      out.tokens.push_back({TokenKind::symbol, sql.substr(i, 1), i});
      ++i;
      continue;
    }
    return fail(std::string("unexpected character '") + c + "'", i);
  }
  out.tokens.push_back({TokenKind::end, {}, n});
  return out;
}

}  // namespace dbfuzz::sql
