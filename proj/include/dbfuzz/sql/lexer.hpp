#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dbfuzz::sql {

enum class TokenKind { identifier, integer, real, string, symbol, end };

/// Views into the tokenized text; the caller keeps the text alive.
struct Token {
  TokenKind kind = TokenKind::end;
  std::string_view text;
  std::size_t offset = 0;

  bool is_symbol(std::string_view s) const { return kind == TokenKind::symbol && text == s; }
  /// Case-insensitive identifier/keyword match.
  bool is_word(std::string_view word) const;
};

struct LexResult {
  std::vector<Token> tokens;  // terminated by a TokenKind::end token
  std::optional<std::string> error;
  std::size_t error_offset = 0;
};

/// Skips whitespace, `--` line comments and `/* */` block comments.
LexResult tokenize(std::string_view sql);

bool is_keyword(std::string_view word);

}  // namespace dbfuzz::sql
