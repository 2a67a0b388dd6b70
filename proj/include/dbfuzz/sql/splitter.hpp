#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace dbfuzz::sql {

/// Splits a script on semicolons at the top nesting level outside string
/// literals and comments. Pieces are trimmed; whitespace-only pieces dropped.
std::vector<std::string> split_statements(std::string_view script);

/// True when the last line of `statement` ends inside a `--` comment, so a
/// terminator appended on the same line would be swallowed.
bool ends_in_line_comment(std::string_view statement);

/// `statement` plus a terminating semicolon that survives re-splitting.
std::string terminate_statement(std::string_view statement);

}  // namespace dbfuzz::sql
