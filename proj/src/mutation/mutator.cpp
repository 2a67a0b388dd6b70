#include "dbfuzz/mutation/mutator.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "dbfuzz/common/text.hpp"
#include "dbfuzz/sql/lexer.hpp"
#include "dbfuzz/sql/splitter.hpp"
#include "dbfuzz/transfer/mask.hpp"

namespace dbfuzz::mutation {

std::string_view to_string(OpKind kind) {
  switch (kind) {
    case OpKind::token_replace: return "token_replace";
    case OpKind::clause_swap: return "clause_swap";
    case OpKind::literal_perturb: return "literal_perturb";
    case OpKind::statement_duplicate: return "statement_duplicate";
    case OpKind::statement_delete: return "statement_delete";
    case OpKind::schema_aware_rename: return "schema_aware_rename";
  }
  return "token_replace";
}

const std::vector<MutationOp>& mutation_ops() {
  static const std::vector<MutationOp> ops = {
      {"token_replace", OpKind::token_replace},           {"clause_swap", OpKind::clause_swap},
      {"literal_perturb", OpKind::literal_perturb},       {"statement_duplicate", OpKind::statement_duplicate},
      {"statement_delete", OpKind::statement_delete},     {"schema_aware_rename", OpKind::schema_aware_rename},
  };
  return ops;
}

namespace {

using sql::Token;
using sql::TokenKind;

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '\''; }

// Two characters that would fuse into a different token when adjacent.
bool needs_gap(char a, char b) {
  return (ident_char(a) && ident_char(b)) || (a == '-' && b == '-') || (a == '/' && b == '*') || (a == '*' && b == '/') ||
         (a == '.' && std::isdigit(static_cast<unsigned char>(b)) != 0) ||
         (std::string_view("<>!=|:").find(a) != std::string_view::npos &&
          std::string_view("<>=|:").find(b) != std::string_view::npos);
}

std::string splice(std::string_view text, std::size_t begin, std::size_t end, std::string_view replacement) {
  std::string out(text.substr(0, begin));
  if (!replacement.empty() && !out.empty() && needs_gap(out.back(), replacement.front())) out += ' ';
  out += replacement;
  if (end < text.size() && !out.empty() && needs_gap(out.back(), text[end])) out += ' ';
  out += text.substr(end);
  return out;
}

std::string splice_token(std::string_view text, const Token& t, std::string_view replacement) {
  return splice(text, t.offset, t.offset + t.text.size(), replacement);
}

template <typename T>
const T& choose(Rng& rng, const std::vector<T>& items) {
  return items[pick(rng, items.size())];
}

const std::vector<std::vector<std::string_view>>& swap_groups() {
  static const std::vector<std::vector<std::string_view>> groups = {
      {"=", "<>", "!=", "<", "<=", ">", ">="},
      {"+", "-", "*", "/", "%"},
      {"AND", "OR"},
      {"ASC", "DESC"},
      {"MIN", "MAX", "SUM", "AVG", "COUNT"},
      {"ABS", "LENGTH", "UPPER", "LOWER", "ROUND"},
      {"LIKE", "NOT LIKE"},
      {"IN", "NOT IN"},
      {"BETWEEN", "NOT BETWEEN"},
  };
  return groups;
}

std::optional<std::string> token_replace(std::string_view stmt, const std::vector<Token>& toks, Rng& rng) {
  struct Site {
    std::size_t token;
    std::vector<std::string> options;
  };
  std::vector<Site> sites;
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    const Token& t = toks[i];
    for (const auto& group : swap_groups()) {
      const bool hit = std::any_of(group.begin(), group.end(), [&](std::string_view g) {
        return t.kind == TokenKind::symbol ? t.text == g : (t.kind == TokenKind::identifier && iequals(t.text, g));
      });
      if (!hit) continue;
      Site s{i, {}};
      for (auto g : group)
        if (!iequals(g, t.text)) s.options.emplace_back(g);
      sites.push_back(std::move(s));
      break;
    }
    if (t.is_word("IS")) sites.push_back({i, {toks[i + 1].is_word("NOT") ? "IS" : "IS NOT"}});
    if (t.is_word("NOT") && i > 0 && toks[i - 1].is_word("IS")) sites.push_back({i, {""}});
    if (t.is_word("SELECT")) sites.push_back({i, {toks[i + 1].is_word("DISTINCT") ? "SELECT" : "SELECT DISTINCT"}});
    if (t.is_word("DISTINCT")) sites.push_back({i, {""}});
    if (t.is_word("WHERE")) sites.push_back({i, {"WHERE NOT"}});
    if (t.is_word("NOT") && !(i > 0 && toks[i - 1].is_word("IS"))) sites.push_back({i, {"NOT NOT"}});
  }
  if (sites.empty()) return std::nullopt;
  const Site& s = choose(rng, sites);
  const std::string& repl = choose(rng, s.options);
  const Token& t = toks[s.token];
  // Removing a NOT that follows IS also removes the now-double space.
  return splice_token(stmt, t, repl);
}

std::vector<std::string> column_pool(const sql::SchemaContext& schema, const std::vector<Token>& toks) {
  std::vector<std::string> cols = schema.column_names();
  if (cols.empty())
    for (const auto& t : toks)
      if (t.kind == TokenKind::identifier && !sql::is_keyword(t.text)) cols.push_back(to_lower(t.text));
  return cols;
}

std::string random_literal(Rng& rng) {
  static const std::vector<std::string> lits = {"0", "1", "-1", "3", "100", "-7", "2.5", "-0.5", "'a'", "'_%'", "'x%'", "NULL"};
  return choose(rng, lits);
}

std::string random_predicate(Rng& rng, const std::vector<std::string>& cols) {
  const std::string col = cols.empty() ? "1" : choose(rng, cols);
  switch (pick(rng, 8)) {
    case 0: return col + " IS NULL";
    case 1: return col + " IS NOT NULL";
    case 2: return col + " LIKE " + choose(rng, std::vector<std::string>{"'_%'", "'%a%'", "'a_'"});
    case 3: return col + " BETWEEN " + random_literal(rng) + " AND " + random_literal(rng);
    case 4: return col + " IN (" + random_literal(rng) + ", " + random_literal(rng) + ")";
    case 5: return "NOT " + col + " = " + random_literal(rng);
    default: {
      static const std::vector<std::string> ops = {"=", "<>", "<", ">", "<=", ">="};
      return col + " " + choose(rng, ops) + " " + random_literal(rng);
    }
  }
}

std::optional<std::string> clause_swap(std::string_view stmt, const std::vector<Token>& toks, Rng& rng,
                                       const sql::SchemaContext& schema) {
  if (toks.size() < 2) return std::nullopt;
  const bool is_select = toks[0].is_word("SELECT");
  const bool filterable = is_select || toks[0].is_word("UPDATE") || toks[0].is_word("DELETE");
  if (!filterable) return std::nullopt;

  // Top-level clause keyword positions.
  std::optional<std::size_t> where, order, limit, offset;
  int depth = 0;
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    const Token& t = toks[i];
    if (t.is_symbol("(")) ++depth;
    if (t.is_symbol(")")) --depth;
    if (depth != 0) continue;
    if (t.is_word("WHERE") && !where) where = i;
    if (t.is_word("ORDER") && !order) order = i;
    if (t.is_word("LIMIT") && !limit) limit = i;
    if (t.is_word("OFFSET") && !offset) offset = i;
  }
  const std::size_t end_token = toks.size() - 1;
  auto next_after = [&](std::size_t from) {
    std::size_t n = end_token;
    for (auto c : {where, order, limit, offset})
      if (c && *c > from) n = std::min(n, *c);
    return n;
  };
  auto offset_of = [&](std::size_t token) { return token == end_token ? stmt.size() : toks[token].offset; };
  const std::vector<std::string> cols = column_pool(schema, toks);

  std::vector<int> choices;
  for (auto c : {where, order, limit, offset})
    if (c) choices.push_back(0);
  if (!where) choices.push_back(1);
  if (is_select && !order) choices.push_back(2);
  if (is_select && !limit) choices.push_back(3);
  if (is_select && limit && !offset) choices.push_back(4);
  if (where) choices.push_back(5);
  if (choices.empty()) return std::nullopt;

  switch (choose(rng, choices)) {
    case 0: {
      std::vector<std::size_t> present;
      for (auto c : {where, order, limit, offset})
        if (c) present.push_back(*c);
      const std::size_t at = choose(rng, present);
      return std::string(trim(splice(stmt, toks[at].offset, offset_of(next_after(at)), "")));
    }
    case 1: {
      const std::size_t at = next_after(0);
      return splice(stmt, offset_of(at), offset_of(at), " WHERE " + random_predicate(rng, cols) + " ");
    }
    case 2: {
      const std::size_t at = limit ? *limit : (offset ? *offset : end_token);
      std::string key = coin(rng, 0.5) || cols.empty() ? "1" : choose(rng, cols);
      std::string clause = " ORDER BY " + key + (coin(rng, 0.5) ? " DESC" : " ASC");
      if (coin(rng, 0.3)) clause += ", " + (cols.empty() ? std::string("1") : choose(rng, cols)) + " DESC";
      return splice(stmt, offset_of(at), offset_of(at), clause + " ");
    }
    case 3: {
      const std::size_t at = offset ? *offset : end_token;
      static const std::vector<std::string> limits = {"0", "1", "2", "5"};
      return splice(stmt, offset_of(at), offset_of(at), " LIMIT " + choose(rng, limits) + " ");
    }
    case 4: {
      static const std::vector<std::string> offsets = {"1", "2", "50", "1000"};
      return std::string(stmt) + " OFFSET " + choose(rng, offsets);
    }
    default: {
      const std::size_t to = next_after(*where);
      return splice(stmt, toks[*where].offset, offset_of(to), "WHERE " + random_predicate(rng, cols) + " ");
    }
  }
}

std::optional<std::string> literal_perturb(std::string_view stmt, const std::vector<Token>& toks, Rng& rng) {
  std::vector<std::size_t> sites;
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    const Token& t = toks[i];
    if (t.kind == TokenKind::integer || t.kind == TokenKind::real || t.kind == TokenKind::string || t.is_word("NULL"))
      sites.push_back(i);
  }
  if (sites.empty()) return std::nullopt;
  const Token& t = toks[choose(rng, sites)];
  std::vector<std::string> options;
  switch (t.kind) {
    case TokenKind::integer:
      options = {"0", "1", "-1", "2", "-2147483648", "2147483647", "9223372036854775807", "-42", "NULL", "0.0", "'0'"};
      if (t.text.size() < 18) {
        const long long v = std::stoll(std::string(t.text));
        options.push_back(std::to_string(v + 1));
        options.push_back(std::to_string(-v));
      }
      break;
    case TokenKind::real: options = {"0.0", "-0.5", "2.5", "-3.75", "1e300", "1", "NULL"}; break;
    case TokenKind::string:
      options = {"''", "'a'", "'_b'", "'%'", "'_%'", "'A%'", std::string("'") + std::string(40, 'x') + "'", "0", "NULL"};
      break;
    default: options = {"0", "-1", "'a'", "1.5"}; break;
  }
  return splice_token(stmt, t, choose(rng, options));
}

std::optional<std::string> schema_rename(std::string_view stmt, const std::vector<Token>& toks, Rng& rng,
                                         const sql::SchemaContext& schema) {
  const std::vector<std::string> tables = schema.table_names();
  const std::vector<std::string> columns = schema.column_names();
  struct Site {
    std::size_t token;
    const std::vector<std::string>* pool;
  };
  std::vector<Site> sites;
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    if (toks[i].kind != TokenKind::identifier || sql::is_keyword(toks[i].text)) continue;
    const std::string name = to_lower(toks[i].text);
    const bool table = std::find(tables.begin(), tables.end(), name) != tables.end();
    const bool column = std::find(columns.begin(), columns.end(), name) != columns.end();
    if (table && tables.size() > 1) sites.push_back({i, &tables});
    if (column && columns.size() > 1) sites.push_back({i, &columns});
  }
  if (sites.empty()) return std::nullopt;
  const Site& s = choose(rng, sites);
  std::vector<std::string> others;
  for (const auto& n : *s.pool)
    if (n != to_lower(toks[s.token].text)) others.push_back(n);
  if (others.empty()) return std::nullopt;
  return splice_token(stmt, toks[s.token], choose(rng, others));
}

struct Unit {
  bool placeholder = false;
  std::string text;
};

}  // namespace

std::optional<std::string> apply_to_statement(OpKind kind, std::string_view statement, Rng& rng,
                                              const sql::SchemaContext& schema) {
  const sql::LexResult lex = sql::tokenize(statement);
  if (lex.error) return std::nullopt;
  switch (kind) {
    case OpKind::token_replace: return token_replace(statement, lex.tokens, rng);
    case OpKind::clause_swap: return clause_swap(statement, lex.tokens, rng, schema);
    case OpKind::literal_perturb: return literal_perturb(statement, lex.tokens, rng);
    case OpKind::schema_aware_rename: return schema_rename(statement, lex.tokens, rng, schema);
    default: return std::nullopt;
  }
}

std::set<std::string> identifiers_in(std::string_view text) {
  std::set<std::string> out;
  const sql::LexResult lex = sql::tokenize(text);
  for (const auto& t : lex.tokens)
    if (t.kind == TokenKind::identifier && !sql::is_keyword(t.text)) out.insert(to_lower(t.text));
  return out;
}

Mutant mutate_with_trace(const CorpusEntry& entry, std::uint64_t rng_seed, const sql::SchemaContext& schema,
                         const MutationParams& params) {
  const sql::Grammar grammar(sql::parse_dialect(entry.test_case.dialect).value_or(sql::Dialect::minisql));
  const transfer::MaskedSql masked = transfer::mask_unparsable(entry.test_case, grammar);

  std::vector<Unit> units;
  std::size_t region = 0;
  for (const auto& stmt : entry.test_case.statements) {
    if (region < masked.masked_regions.size() && masked.masked_regions[region].original_fragment == stmt &&
        !grammar.accepts_statement(stmt))
      units.push_back({true, transfer::placeholder_line(masked.masked_regions[region++].placeholder_id)});
    else
      units.push_back({false, stmt});
  }

  Rng rng(rng_seed);
  Mutant out;
  const std::size_t ops = 1 + pick(rng, std::max<std::size_t>(1, params.max_ops));
  const auto& catalog = mutation_ops();
  for (std::size_t slot = 0; slot < ops; ++slot) {
    for (std::size_t attempt = 0; attempt < params.attempts; ++attempt) {
      const OpKind kind = catalog[pick(rng, catalog.size())].kind;
      std::vector<std::size_t> visible;
      for (std::size_t i = 0; i < units.size(); ++i)
        if (!units[i].placeholder) visible.push_back(i);
      if (kind == OpKind::statement_delete) {
        if (units.size() < 2) continue;
        units.erase(units.begin() + static_cast<std::ptrdiff_t>(pick(rng, units.size())));
      } else if (kind == OpKind::statement_duplicate) {
        if (visible.empty()) continue;
        Unit copy = units[choose(rng, visible)];
        units.insert(units.begin() + static_cast<std::ptrdiff_t>(pick(rng, units.size() + 1)), std::move(copy));
      } else {
        if (visible.empty()) continue;
        const std::size_t at = choose(rng, visible);
        std::optional<std::string> next = apply_to_statement(kind, units[at].text, rng, schema);
        if (!next) continue;
        std::string trimmed(trim(*next));
        if (trimmed.empty() || trimmed == units[at].text || !grammar.accepts_statement(trimmed)) continue;
        units[at].text = std::move(trimmed);
      }
      out.applied.push_back(kind);
      break;
    }
  }

  std::string visible_text;
  for (const auto& u : units) visible_text += u.placeholder ? u.text + "\n" : sql::terminate_statement(u.text) + "\n";
  out.test_case = transfer::unmask(masked, visible_text);
  out.test_case.origin = sql::Origin::mutated;
  return out;
}

sql::SqlTestCase mutate(const CorpusEntry& entry, std::uint64_t rng_seed, const sql::SchemaContext& schema,
                        const MutationParams& params) {
  return mutate_with_trace(entry, rng_seed, schema, params).test_case;
}

}  // namespace dbfuzz::mutation
