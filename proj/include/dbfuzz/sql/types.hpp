#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dbfuzz::sql {

/// Grammar variants understood by the bundled parser. `minisql` is the
/// mini target's own language; `postgresql` additionally accepts the
/// PostgreSQL type names and boolean literals found in foreign seed corpora.
enum class Dialect { minisql, postgresql };

std::string_view to_string(Dialect dialect);
std::optional<Dialect> parse_dialect(std::string_view label);

struct ColumnSchema {
  std::string name;
  std::string type;
  friend bool operator==(const ColumnSchema&, const ColumnSchema&) = default;
};

struct TableSchema {
  std::string name;
  std::vector<ColumnSchema> columns;
  friend bool operator==(const TableSchema&, const TableSchema&) = default;
};

struct SchemaContext {
  std::vector<TableSchema> tables;
  std::string captured_from;
  std::vector<std::string> capture_errors;

  const TableSchema* find(std::string_view table) const;
  std::vector<std::string> table_names() const;
  std::vector<std::string> column_names() const;
  bool same_tables(const SchemaContext& other) const { return tables == other.tables; }
  /// Throws PreconditionError on duplicate table or column names.
  void validate() const;
  friend bool operator==(const SchemaContext&, const SchemaContext&) = default;
};

enum class Origin { corpus, transferred, mutated };

std::string_view to_string(Origin origin);
std::optional<Origin> parse_origin(std::string_view label);

/// The unit flowing through transfer, mutation and execution. Statements are
/// stored trimmed and without their terminating semicolon.
struct SqlTestCase {
  std::vector<std::string> statements;
  std::string dialect;
  std::shared_ptr<const SchemaContext> schema;
  Origin origin = Origin::corpus;
  std::string lineage_id;

  /// Throws PreconditionError when empty or when a statement is blank.
  void validate() const;
  std::string render() const;
};

}  // namespace dbfuzz::sql
