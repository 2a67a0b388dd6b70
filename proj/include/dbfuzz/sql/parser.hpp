#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "dbfuzz/sql/ast.hpp"
#include "dbfuzz/sql/coverage.hpp"
#include "dbfuzz/sql/types.hpp"

namespace dbfuzz::sql {

struct ParseOutcome {
  std::optional<Statement> statement;
  std::string error;
  std::size_t error_offset = 0;

  bool ok() const { return statement.has_value(); }
};

inline constexpr int kMaxExpressionDepth = 64;

/// Parses one statement (no trailing semicolon required; one is tolerated).
/// Never throws. `coverage` may be null.
ParseOutcome parse_statement(std::string_view sql, Dialect dialect, Coverage* coverage = nullptr);

/// The grammar handle used by masking and mutation.
class Grammar {
 public:
  explicit Grammar(Dialect dialect = Dialect::minisql) : dialect_(dialect) {}

  Dialect dialect() const { return dialect_; }
  bool accepts_statement(std::string_view statement) const;
  /// True when every top-level statement parses; comment-only or empty
  /// scripts are accepted.
  bool accepts_script(std::string_view script) const;

 private:
  Dialect dialect_;
};

}  // namespace dbfuzz::sql
