#include "dbfuzz/transfer/transfer.hpp"

#include <json.hpp>

#include "dbfuzz/common/error.hpp"
#include "dbfuzz/common/text.hpp"
#include "dbfuzz/sql/lexer.hpp"
#include "dbfuzz/sql/corpus_io.hpp"
#include "dbfuzz/sql/splitter.hpp"

namespace dbfuzz::transfer {

sql::SchemaContext capture_schema(const sql::SqlTestCase& seed, sql::Executor& reference) {
  if (!reference.available()) throw ExecutorUnavailable("reference executor '" + reference.name() + "' is unavailable");
  reference.reset();
  reference.set_case_context(seed.lineage_id);
  std::vector<std::string> errors;
  for (std::size_t i = 0; i < seed.statements.size(); ++i) {
    const sql::StatementResult r = reference.execute_statement(seed.statements[i]);
    if (!r.accepted()) errors.push_back("stmt #" + std::to_string(i) + ": " + r.message);
  }
  sql::SchemaContext schema = reference.catalog_dump();
  schema.captured_from = seed.dialect;
  schema.capture_errors = std::move(errors);
  return schema;
}

std::string render_schema(const sql::SchemaContext& schema) {
  std::string out;
  for (const auto& t : schema.tables) {
    std::vector<std::string> cols;
    for (const auto& c : t.columns) cols.push_back(c.name + " " + c.type);
    out += t.name + "(" + join(cols, ", ") + ")\n";
  }
  return out.empty() ? "(no tables)\n" : out;
}

llm::PromptRequest build_transfer_prompt(const sql::SqlTestCase& seed, const sql::SchemaContext& schema,
                                         std::string_view target_dialect) {
  if (seed.origin != sql::Origin::corpus) throw PreconditionError("only corpus seeds are transferred");
  llm::PromptRequest req;
  req.system_text = "You translate SQL test cases between database dialects.";
  req.user_text = "Case: " + seed.lineage_id + "\n";
  req.user_text += "Source dialect: " + seed.dialect + "\n";
  req.user_text += "Target dialect: " + std::string(target_dialect) + "\n\n";
  req.user_text += "Schema observed after running the case on its source system:\n" + render_schema(schema);
  req.user_text += "\nStatements (" + std::to_string(seed.statements.size()) + "):\n";
  for (const auto& s : seed.statements) req.user_text += sql::terminate_statement(s) + "\n";
  req.user_text += "\nRewrite the statements for the target dialect. Keep the same number of statements in the same "
                   "order and keep what each one does. Answer with SQL only, each statement ending in a semicolon.\n";
  req.tag = "seed-transfer";
  return req;
}

std::vector<std::string> extract_statements(std::string_view text) {
  std::string body;
  for (const auto& line : split_lines(text)) {
    if (trim(line).substr(0, 3) == "```") {
      continue;
    }
    body += line + "\n";
  }
  std::vector<std::string> out;
  for (auto& piece : sql::split_statements(body)) {
    const sql::LexResult lex = sql::tokenize(piece);
    if (!lex.error && lex.tokens.size() <= 1) continue;
    out.push_back(std::move(piece));
  }
  return out;
}

sql::SqlTestCase transfer_seed(const sql::SqlTestCase& seed, const sql::SchemaContext& schema, llm::Provider& llm,
                               std::string_view target_dialect) {
  sql::SqlTestCase out = seed;
  out.origin = sql::Origin::transferred;
  out.dialect = std::string(target_dialect);
  out.schema = std::make_shared<const sql::SchemaContext>(schema);
  const llm::PromptResponse resp = llm.complete(build_transfer_prompt(seed, schema, target_dialect));
  if (resp.ok()) {
    std::vector<std::string> statements = extract_statements(resp.text);
    if (!statements.empty()) out.statements = std::move(statements);
  }
  return out;
}

Ratio semantic_correctness_ratio(const std::vector<sql::SqlTestCase>& corpus, sql::Executor& executor) {
  if (corpus.empty()) throw PreconditionError("semantic correctness ratio of an empty corpus");
  if (!executor.available()) throw ExecutorUnavailable("executor '" + executor.name() + "' is unavailable");
  Ratio r{0, 0};
  for (const auto& c : corpus) {
    const sql::ExecutionResult result = executor.execute(c);
    r.numerator += result.accepted_count();
    r.denominator += result.statements.size();
  }
  if (r.denominator == 0) throw PreconditionError("semantic correctness ratio over zero statements");
  return r;
}

void write_transferred_corpus(const std::string& path, const std::vector<sql::SqlTestCase>& cases) {
  write_file(path, sql::render_corpus(cases));
  nlohmann::json manifest = nlohmann::json::array();
  for (const auto& c : cases)
    manifest.push_back({{"case_id", c.lineage_id},
                        {"ancestor", c.lineage_id},
                        {"origin", std::string(sql::to_string(c.origin))},
                        {"statements", c.statements.size()}});
  write_file(path + ".lineage.json", manifest.dump(2) + "\n");
}

}  // namespace dbfuzz::transfer
