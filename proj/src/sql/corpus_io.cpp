#include "dbfuzz/sql/corpus_io.hpp"

#include <filesystem>

#include "dbfuzz/common/error.hpp"
#include "dbfuzz/common/text.hpp"
#include "dbfuzz/sql/lexer.hpp"
#include "dbfuzz/sql/splitter.hpp"

namespace dbfuzz::sql {

namespace {

constexpr std::string_view kDialectTag = "-- dialect:";
constexpr std::string_view kCaseIdTag = "-- case-id:";
constexpr std::string_view kBoundary = "-- case-boundary";

bool comment_only(std::string_view statement) {
  const LexResult lexed = tokenize(statement);
  return !lexed.error && lexed.tokens.size() == 1;
}

}  // namespace

std::vector<SqlTestCase> parse_corpus(std::string_view text, std::string_view default_prefix) {
  std::vector<SqlTestCase> cases;
  std::string dialect;
  std::string body;
  std::string case_id;
  std::size_t line_no = 0;

  auto flush = [&]() {
    SqlTestCase c;
    for (auto& s : split_statements(body))
      if (!comment_only(s)) c.statements.push_back(std::move(s));
    if (!c.statements.empty()) {
      c.dialect = dialect;
      c.origin = Origin::corpus;
      c.lineage_id = case_id.empty() ? std::string(default_prefix) + "-" + std::to_string(cases.size() + 1) : case_id;
      cases.push_back(std::move(c));
    }
    body.clear();
    case_id.clear();
  };

  for (const auto& raw : split_lines(text)) {
    ++line_no;
    const auto line = trim(raw);
    if (starts_with_ci(line, kDialectTag)) {
      const auto label = trim(line.substr(kDialectTag.size()));
      if (label.empty()) throw ParseError(line_no, "dialect", "empty dialect label");
      if (!dialect.empty() && dialect != label)
        throw ParseError(line_no, "dialect", "a corpus file carries exactly one dialect");
      dialect = std::string(label);
      continue;
    }
    if (starts_with_ci(line, kCaseIdTag)) {
      case_id = std::string(trim(line.substr(kCaseIdTag.size())));
      continue;
    }
    if (iequals(line, kBoundary)) {
      flush();
      continue;
    }
    body += raw;
    body += '\n';
  }
  flush();
  if (dialect.empty() && !cases.empty()) throw ParseError(1, "dialect", "missing '-- dialect: <label>' header");
  return cases;
}

std::vector<SqlTestCase> load_corpus(const std::string& path) {
  return parse_corpus(read_file(path), std::filesystem::path(path).stem().string());
}

std::string render_corpus(const std::vector<SqlTestCase>& cases) {
  std::string out;
  out += std::string(kDialectTag) + " " + (cases.empty() ? "minisql" : cases.front().dialect) + "\n";
  for (std::size_t i = 0; i < cases.size(); ++i) {
    if (i != 0) out += std::string(kBoundary) + "\n";
    out += std::string(kCaseIdTag) + " " + cases[i].lineage_id + "\n";
    out += cases[i].render();
  }
  return out;
}

}  // namespace dbfuzz::sql
