#include "dbfuzz/sql/types.hpp"

#include <set>

#include "dbfuzz/common/error.hpp"
#include "dbfuzz/common/text.hpp"
#include "dbfuzz/sql/splitter.hpp"

namespace dbfuzz::sql {

std::string_view to_string(Dialect dialect) {
  switch (dialect) {
    case Dialect::minisql: return "minisql";
    case Dialect::postgresql: return "postgresql";
  }
  return "minisql";
}

std::optional<Dialect> parse_dialect(std::string_view label) {
  const std::string l = to_lower(trim(label));
  if (l == "minisql") return Dialect::minisql;
  if (l == "postgresql" || l == "postgres" || l == "pg") return Dialect::postgresql;
  return std::nullopt;
}

const TableSchema* SchemaContext::find(std::string_view table) const {
  for (const auto& t : tables)
    if (t.name == table) return &t;
  return nullptr;
}

std::vector<std::string> SchemaContext::table_names() const {
  std::vector<std::string> names;
  for (const auto& t : tables) names.push_back(t.name);
  return names;
}

std::vector<std::string> SchemaContext::column_names() const {
  std::vector<std::string> names;
  std::set<std::string> seen;
  for (const auto& t : tables)
    for (const auto& c : t.columns)
      if (seen.insert(c.name).second) names.push_back(c.name);
  return names;
}

void SchemaContext::validate() const {
  std::set<std::string> table_seen;
  for (const auto& t : tables) {
    if (!table_seen.insert(t.name).second) throw PreconditionError("schema: duplicate table '" + t.name + "'");
    std::set<std::string> column_seen;
    for (const auto& c : t.columns)
      if (!column_seen.insert(c.name).second)
        throw PreconditionError("schema: duplicate column '" + c.name + "' in table '" + t.name + "'");
  }
}

std::string_view to_string(Origin origin) {
  switch (origin) {
    case Origin::corpus: return "corpus";
    case Origin::transferred: return "transferred";
    case Origin::mutated: return "mutated";
  }
  return "corpus";
}

std::optional<Origin> parse_origin(std::string_view label) {
  for (auto o : {Origin::corpus, Origin::transferred, Origin::mutated})
    if (to_string(o) == label) return o;
  return std::nullopt;
}

void SqlTestCase::validate() const {
  if (statements.empty()) throw PreconditionError("test case '" + lineage_id + "' has no statements");
  for (const auto& s : statements)
    if (trim(s).empty()) throw PreconditionError("test case '" + lineage_id + "' has a blank statement");
}

std::string SqlTestCase::render() const {
  std::string out;
  for (const auto& s : statements) {
    out += terminate_statement(s);
    out += '\n';
  }
  return out;
}

}  // namespace dbfuzz::sql
