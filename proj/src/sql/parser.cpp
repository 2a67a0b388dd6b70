#include "dbfuzz/sql/parser.hpp"

#include <charconv>
#include <cstdlib>

#include "dbfuzz/common/text.hpp"
#include "dbfuzz/sql/lexer.hpp"
#include "dbfuzz/sql/splitter.hpp"

namespace dbfuzz::sql {

namespace {

constexpr std::uint32_t kCoverageBase = 10000;

struct SyntaxError {
  std::string message;
  std::size_t offset;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, Dialect dialect, Coverage* coverage)
      : tokens_(std::move(tokens)), dialect_(dialect), cov_(coverage) {}

  Statement statement() {
    const Token& t = peek();
    Statement out = [&]() -> Statement {
      if (DBFUZZ_COND(cov_, t.is_word("CREATE"))) return create_table();
      if (DBFUZZ_COND(cov_, t.is_word("DROP"))) return drop_table();
      if (DBFUZZ_COND(cov_, t.is_word("INSERT"))) return insert();
      if (DBFUZZ_COND(cov_, t.is_word("SELECT"))) return select();
      if (DBFUZZ_COND(cov_, t.is_word("UPDATE"))) return update();
      if (DBFUZZ_COND(cov_, t.is_word("DELETE"))) return remove();
      fail(t.kind == TokenKind::end ? "empty statement" : "expected a statement keyword");
    }();
    if (DBFUZZ_COND(cov_, peek().kind != TokenKind::end)) fail("unexpected trailing input");
    return out;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }
  const Token& advance() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  [[noreturn]] void fail(const std::string& message) const {
    const Token& t = peek();
    std::string near = t.kind == TokenKind::end ? "end of input" : "'" + std::string(t.text) + "'";
    throw SyntaxError{message + " near " + near, t.offset};
  }
  bool accept_word(std::string_view word) {
    if (peek().is_word(word)) {
      advance();
      return true;
    }
    return false;
  }
  bool accept_symbol(std::string_view symbol) {
    if (peek().is_symbol(symbol)) {
      advance();
      return true;
    }
    return false;
  }
  void expect_word(std::string_view word) {
    if (!accept_word(word)) fail("expected " + std::string(word));
  }
  void expect_symbol(std::string_view symbol) {
    if (!accept_symbol(symbol)) fail("expected '" + std::string(symbol) + "'");
  }

  std::string identifier() {
    const Token& t = peek();
    if (t.kind != TokenKind::identifier) fail("expected an identifier");
    if (DBFUZZ_COND(cov_, is_keyword(t.text))) fail("reserved word used as identifier");
    advance();
    return to_lower(t.text);
  }

  std::int64_t integer_literal() {
    bool negative = false;
    if (DBFUZZ_COND(cov_, accept_symbol("-"))) negative = true;
    const Token& t = peek();
    if (t.kind != TokenKind::integer) fail("expected an integer");
    advance();
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (DBFUZZ_COND(cov_, ec != std::errc{})) fail("integer literal out of range");
    return negative ? -v : v;
  }

  ColumnDef column_def() {
    ColumnDef def;
    def.name = identifier();
    type_name(def);
    while (true) {
      if (DBFUZZ_COND(cov_, accept_word("PRIMARY"))) {
        expect_word("KEY");
        def.primary_key = true;
      } else if (DBFUZZ_COND(cov_, accept_word("NOT"))) {
        expect_word("NULL");
        def.not_null = true;
      } else if (DBFUZZ_COND(cov_, accept_word("UNIQUE"))) {
        def.primary_key = def.primary_key;  // accepted, not enforced
      } else {
        break;
      }
    }
    return def;
  }

  void optional_type_args(std::string& label, int max_args) {
    if (!DBFUZZ_COND(cov_, accept_symbol("("))) return;
    label += "(";
    for (int i = 0; i < max_args; ++i) {
      const Token& t = peek();
      if (t.kind != TokenKind::integer) fail("expected a type length");
      label += std::string(t.text);
      advance();
      if (i + 1 < max_args && accept_symbol(",")) {
        label += ",";
        continue;
      }
      break;
    }
    expect_symbol(")");
    label += ")";
  }

  void type_name(ColumnDef& def) {
    const Token& t = peek();
    if (t.kind != TokenKind::identifier) fail("expected a type name");
    const std::string word = to_upper(t.text);
    advance();
    def.type_label = word;
    if (DBFUZZ_COND(cov_, word == "INT" || word == "INTEGER")) {
      def.affinity = Affinity::integer;
      return;
    }
    if (DBFUZZ_COND(cov_, word == "TEXT")) {
      def.affinity = Affinity::text;
      return;
    }
    if (DBFUZZ_COND(cov_, word == "REAL")) {
      def.affinity = Affinity::real;
      return;
    }
    if (DBFUZZ_COND(cov_, dialect_ == Dialect::postgresql)) {
      if (word == "SERIAL" || word == "BIGSERIAL" || word == "SMALLINT" || word == "BIGINT" || word == "BOOLEAN" ||
          word == "BOOL") {
        def.affinity = Affinity::integer;
        return;
      }
      if (word == "FLOAT" || word == "NUMERIC" || word == "DECIMAL") {
        def.affinity = Affinity::real;
        optional_type_args(def.type_label, 2);
        return;
      }
      if (word == "DOUBLE") {
        if (!peek().is_word("PRECISION")) fail("expected PRECISION");
        advance();
        def.type_label = "DOUBLE PRECISION";
        def.affinity = Affinity::real;
        return;
      }
      if (word == "VARCHAR" || word == "CHAR" || word == "DATE" || word == "TIMESTAMP") {
        def.affinity = Affinity::text;
        optional_type_args(def.type_label, 1);
        return;
      }
    }
    fail("unknown type " + word);
  }

  CreateTable create_table() {
    expect_word("CREATE");
    expect_word("TABLE");
    CreateTable out;
    if (DBFUZZ_COND(cov_, accept_word("IF"))) {
      expect_word("NOT");
      expect_word("EXISTS");
      out.if_not_exists = true;
    }
    out.table = identifier();
    expect_symbol("(");
    do {
      out.columns.push_back(column_def());
    } while (DBFUZZ_COND(cov_, accept_symbol(",")));
    expect_symbol(")");
    return out;
  }

  DropTable drop_table() {
    expect_word("DROP");
    expect_word("TABLE");
    DropTable out;
    if (DBFUZZ_COND(cov_, accept_word("IF"))) {
      expect_word("EXISTS");
      out.if_exists = true;
    }
    out.table = identifier();
    return out;
  }

  Insert insert() {
    expect_word("INSERT");
    expect_word("INTO");
    Insert out;
    out.table = identifier();
    if (DBFUZZ_COND(cov_, accept_symbol("("))) {
      do {
        out.columns.push_back(identifier());
      } while (accept_symbol(","));
      expect_symbol(")");
    }
    if (DBFUZZ_COND(cov_, peek().is_word("SELECT"))) {
      out.source = std::make_shared<Select>(select());
      return out;
    }
    expect_word("VALUES");
    do {
      expect_symbol("(");
      std::vector<ExprPtr> row;
      do {
        row.push_back(expression());
      } while (accept_symbol(","));
      expect_symbol(")");
      out.rows.push_back(std::move(row));
    } while (DBFUZZ_COND(cov_, accept_symbol(",")));
    return out;
  }

  Select select() {
    expect_word("SELECT");
    Select out;
    if (DBFUZZ_COND(cov_, accept_word("DISTINCT"))) out.distinct = true;
    if (DBFUZZ_COND(cov_, accept_symbol("*"))) {
      out.star = true;
    } else {
      do {
        SelectItem item;
        item.expr = expression();
        if (DBFUZZ_COND(cov_, accept_word("AS"))) {
          item.alias = identifier();
        } else if (peek().kind == TokenKind::identifier && !is_keyword(peek().text)) {
          item.alias = identifier();
        }
        out.items.push_back(std::move(item));
      } while (accept_symbol(","));
    }
    if (DBFUZZ_COND(cov_, accept_word("FROM"))) out.from = identifier();
    if (DBFUZZ_COND(cov_, accept_word("WHERE"))) out.where = expression();
    if (DBFUZZ_COND(cov_, accept_word("ORDER"))) {
      expect_word("BY");
      do {
        OrderTerm term;
        term.expr = expression();
        if (DBFUZZ_COND(cov_, accept_word("DESC"))) {
          term.descending = true;
        } else {
          accept_word("ASC");
        }
        out.order_by.push_back(std::move(term));
      } while (accept_symbol(","));
    }
    if (DBFUZZ_COND(cov_, accept_word("LIMIT"))) {
      out.limit = integer_literal();
      if (DBFUZZ_COND(cov_, accept_word("OFFSET"))) out.offset = integer_literal();
    }
    return out;
  }

  Update update() {
    expect_word("UPDATE");
    Update out;
    out.table = identifier();
    expect_word("SET");
    do {
      Assignment a;
      a.column = identifier();
      expect_symbol("=");
      a.value = expression();
      out.assignments.push_back(std::move(a));
    } while (DBFUZZ_COND(cov_, accept_symbol(",")));
    if (DBFUZZ_COND(cov_, accept_word("WHERE"))) out.where = expression();
    return out;
  }

  Delete remove() {
    expect_word("DELETE");
    expect_word("FROM");
    Delete out;
    out.table = identifier();
    if (DBFUZZ_COND(cov_, accept_word("WHERE"))) out.where = expression();
    return out;
  }

  // Expressions ---------------------------------------------------------

  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& parser) : p(parser) {
      if (++p.depth_ > kMaxExpressionDepth) p.fail("expression nested too deeply");
    }
    ~DepthGuard() { --p.depth_; }
  };

  static ExprPtr make(ExprKind kind) {
    auto e = std::make_unique<Expr>();
    e->kind = kind;
    return e;
  }
  static ExprPtr binary(std::string op, ExprPtr l, ExprPtr r) {
    auto e = make(ExprKind::binary);
    e->op = std::move(op);
    e->children.push_back(std::move(l));
    e->children.push_back(std::move(r));
    return e;
  }

  ExprPtr expression() {
    DepthGuard guard(*this);
    return disjunction();
  }

  ExprPtr disjunction() {
    auto left = conjunction();
    while (DBFUZZ_COND(cov_, accept_word("OR"))) left = binary("OR", std::move(left), conjunction());
    return left;
  }

  ExprPtr conjunction() {
    auto left = negation();
    while (DBFUZZ_COND(cov_, accept_word("AND"))) left = binary("AND", std::move(left), negation());
    return left;
  }

  ExprPtr negation() {
    if (DBFUZZ_COND(cov_, accept_word("NOT"))) {
      DepthGuard guard(*this);
      auto e = make(ExprKind::unary);
      e->op = "NOT";
      e->children.push_back(negation());
      return e;
    }
    return comparison();
  }

  ExprPtr comparison() {
    auto left = additive();
    const Token& t = peek();
    if (t.kind == TokenKind::symbol &&
        (t.text == "=" || t.text == "<>" || t.text == "!=" || t.text == "<" || t.text == "<=" || t.text == ">" ||
         t.text == ">=")) {
      std::string op(t.text);
      if (DBFUZZ_COND(cov_, op == "!=")) op = "<>";
      advance();
      return binary(op, std::move(left), additive());
    }
    if (DBFUZZ_COND(cov_, accept_word("IS"))) {
      auto e = make(ExprKind::is_null);
      e->negated = accept_word("NOT");
      expect_word("NULL");
      e->children.push_back(std::move(left));
      return e;
    }
    const bool negated = peek().is_word("NOT") &&
                         (peek(1).is_word("BETWEEN") || peek(1).is_word("IN") || peek(1).is_word("LIKE"));
    if (DBFUZZ_COND(cov_, negated)) advance();
    if (DBFUZZ_COND(cov_, accept_word("BETWEEN"))) {
      auto e = make(ExprKind::between);
      e->negated = negated;
      e->children.push_back(std::move(left));
      e->children.push_back(additive());
      expect_word("AND");
      e->children.push_back(additive());
      return e;
    }
    if (DBFUZZ_COND(cov_, accept_word("IN"))) {
      auto e = make(ExprKind::in_list);
      e->negated = negated;
      e->children.push_back(std::move(left));
      expect_symbol("(");
      do {
        e->children.push_back(expression());
      } while (accept_symbol(","));
      expect_symbol(")");
      return e;
    }
    if (DBFUZZ_COND(cov_, accept_word("LIKE"))) {
      auto e = make(ExprKind::like);
      e->negated = negated;
      e->children.push_back(std::move(left));
      e->children.push_back(additive());
      return e;
    }
    if (negated) fail("expected BETWEEN, IN or LIKE after NOT");
    return left;
  }

  ExprPtr additive() {
    auto left = multiplicative();
    while (true) {
      const Token& t = peek();
      if (DBFUZZ_COND(cov_, t.is_symbol("+") || t.is_symbol("-") || t.is_symbol("||"))) {
        std::string op(t.text);
        advance();
        left = binary(op, std::move(left), multiplicative());
      } else {
        return left;
      }
    }
  }

  ExprPtr multiplicative() {
    auto left = unary();
    while (true) {
      const Token& t = peek();
      if (DBFUZZ_COND(cov_, t.is_symbol("*") || t.is_symbol("/") || t.is_symbol("%"))) {
        std::string op(t.text);
        advance();
        left = binary(op, std::move(left), unary());
      } else {
        return left;
      }
    }
  }

  ExprPtr unary() {
    if (DBFUZZ_COND(cov_, peek().is_symbol("-") || peek().is_symbol("+"))) {
      DepthGuard guard(*this);
      auto e = make(ExprKind::unary);
      e->op = std::string(advance().text);
      e->children.push_back(unary());
      return e;
    }
    return primary();
  }

  ExprPtr primary() {
    const Token& t = peek();
    if (DBFUZZ_COND(cov_, t.kind == TokenKind::integer)) {
      advance();
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
      if (DBFUZZ_COND(cov_, ec != std::errc{})) fail("integer literal out of range");
      auto e = make(ExprKind::literal);
      e->value = Value(v);
      return e;
    }
    if (DBFUZZ_COND(cov_, t.kind == TokenKind::real)) {
      advance();
      auto e = make(ExprKind::literal);
      e->value = Value(std::strtod(std::string(t.text).c_str(), nullptr));
      return e;
    }
    if (DBFUZZ_COND(cov_, t.kind == TokenKind::string)) {
      advance();
      std::string body;
      for (std::size_t i = 1; i + 1 < t.text.size(); ++i) {
        body += t.text[i];
        if (t.text[i] == '\'') ++i;
      }
      auto e = make(ExprKind::literal);
      e->value = Value(std::move(body));
      return e;
    }
    if (DBFUZZ_COND(cov_, accept_symbol("("))) {
      auto inner = expression();
      expect_symbol(")");
      return inner;
    }
    if (DBFUZZ_COND(cov_, t.is_word("NULL"))) {
      advance();
      return make(ExprKind::literal);
    }
    if (DBFUZZ_COND(cov_, dialect_ == Dialect::postgresql && (t.is_word("TRUE") || t.is_word("FALSE")))) {
      const bool truth = t.is_word("TRUE");
      advance();
      auto e = make(ExprKind::literal);
      e->value = Value(std::int64_t{truth ? 1 : 0});
      return e;
    }
    if (t.kind == TokenKind::identifier && !is_keyword(t.text)) {
      if (DBFUZZ_COND(cov_, peek(1).is_symbol("("))) return call();
      auto e = make(ExprKind::column);
      e->name = identifier();
      return e;
    }
    fail("expected an expression");
  }

  ExprPtr call() {
    auto e = make(ExprKind::call);
    e->name = to_upper(advance().text);
    expect_symbol("(");
    if (DBFUZZ_COND(cov_, accept_symbol("*"))) {
      e->star = true;
      expect_symbol(")");
      return e;
    }
    if (DBFUZZ_COND(cov_, accept_word("DISTINCT"))) e->distinct = true;
    if (DBFUZZ_COND(cov_, !accept_symbol(")"))) {
      do {
        e->children.push_back(expression());
      } while (accept_symbol(","));
      expect_symbol(")");
    }
    return e;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  Dialect dialect_;
  Coverage* cov_;
  int depth_ = 0;
};

}  // namespace

const char* statement_kind(const Statement& statement) {
  static constexpr const char* kNames[] = {"create", "drop", "insert", "select", "update", "delete"};
  return kNames[statement.index()];
}

ParseOutcome parse_statement(std::string_view sql, Dialect dialect, Coverage* coverage) {
  ParseOutcome out;
  LexResult lexed = tokenize(sql);
  if (DBFUZZ_COND(coverage, lexed.error.has_value())) {
    out.error = *lexed.error;
    out.error_offset = lexed.error_offset;
    return out;
  }
  try {
    Parser parser(std::move(lexed.tokens), dialect, coverage);
    out.statement = parser.statement();
  } catch (const SyntaxError& e) {
    out.error = e.message;
    out.error_offset = e.offset;
  }
  return out;
}

bool Grammar::accepts_statement(std::string_view statement) const { return parse_statement(statement, dialect_).ok(); }

bool Grammar::accepts_script(std::string_view script) const {
  for (const auto& statement : split_statements(script)) {
    const LexResult lexed = tokenize(statement);
    if (!lexed.error && lexed.tokens.size() == 1) continue;  // comment-only piece
    if (!accepts_statement(statement)) return false;
  }
  return true;
}

}  // namespace dbfuzz::sql
