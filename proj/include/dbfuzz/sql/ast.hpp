#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dbfuzz/sql/value.hpp"

namespace dbfuzz::sql {

enum class ExprKind { literal, column, unary, binary, is_null, between, in_list, like, call };

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

/// Expression node. Which fields are meaningful depends on `kind`:
///   literal  - value
///   column   - name (lower-cased)
///   unary    - op ("-", "+", "NOT"), children[0]
///   binary   - op, children[0..1]
///   is_null  - negated, children[0]
///   between  - negated, children[0..2]
///   in_list  - negated, children[0] is the probe
///   like     - negated, children[0..1]
///   call     - name (upper-cased), star, distinct, children = args
struct Expr {
  ExprKind kind = ExprKind::literal;
  Value value;
  std::string name;
  std::string op;
  bool negated = false;
  bool star = false;
  bool distinct = false;
  std::vector<ExprPtr> children;
};

struct ColumnDef {
  std::string name;
  std::string type_label;  // as declared, upper-cased, e.g. "VARCHAR(20)"
  Affinity affinity = Affinity::integer;
  bool primary_key = false;
  bool not_null = false;
};

struct CreateTable {
  std::string table;
  bool if_not_exists = false;
  std::vector<ColumnDef> columns;
};

struct DropTable {
  std::string table;
  bool if_exists = false;
};

struct Select;

/// Either literal VALUES rows or a SELECT source.
struct Insert {
  std::string table;
  std::vector<std::string> columns;
  std::vector<std::vector<ExprPtr>> rows;
  std::shared_ptr<Select> source;
};

struct SelectItem {
  ExprPtr expr;
  std::string alias;
};

struct OrderTerm {
  ExprPtr expr;
  bool descending = false;
};

struct Select {
  bool distinct = false;
  bool star = false;
  std::vector<SelectItem> items;
  std::optional<std::string> from;
  ExprPtr where;
  std::vector<OrderTerm> order_by;
  std::optional<std::int64_t> limit;
  std::optional<std::int64_t> offset;
};

struct Assignment {
  std::string column;
  ExprPtr value;
};

struct Update {
  std::string table;
  std::vector<Assignment> assignments;
  ExprPtr where;
};

struct Delete {
  std::string table;
  ExprPtr where;
};

using Statement = std::variant<CreateTable, DropTable, Insert, Select, Update, Delete>;

const char* statement_kind(const Statement& statement);

}  // namespace dbfuzz::sql
