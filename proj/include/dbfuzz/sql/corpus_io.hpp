#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dbfuzz/sql/types.hpp"

namespace dbfuzz::sql {

/// Seed corpus text format:
///
///   -- dialect: postgresql
///   -- case-id: pg-1            (optional; defaults to <default_prefix>-<n>)
///   CREATE TABLE t(a INT);
///   INSERT INTO t VALUES (1);
///   -- case-boundary
///   ...
///
/// Statements are separated by semicolons; `-- case-boundary` lines separate
/// cases. Other comments stay attached to the statement that follows them.
std::vector<SqlTestCase> parse_corpus(std::string_view text, std::string_view default_prefix = "case");
std::vector<SqlTestCase> load_corpus(const std::string& path);

/// Inverse of parse_corpus for cases sharing one dialect; always writes
/// explicit case ids.
std::string render_corpus(const std::vector<SqlTestCase>& cases);

}  // namespace dbfuzz::sql
