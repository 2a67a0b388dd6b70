#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "dbfuzz/common/ratio.hpp"
#include "dbfuzz/llm/provider.hpp"
#include "dbfuzz/sql/executor.hpp"
#include "dbfuzz/sql/types.hpp"

namespace dbfuzz::transfer {

/// Replays `seed` on a fresh reference executor and returns its catalog
/// afterward. Failing statements are recorded in capture_errors.
/// Throws ExecutorUnavailable when the executor cannot be reached.
sql::SchemaContext capture_schema(const sql::SqlTestCase& seed, sql::Executor& reference);

/// Schema as one `table(col TYPE, ...)` line per table.
std::string render_schema(const sql::SchemaContext& schema);

llm::PromptRequest build_transfer_prompt(const sql::SqlTestCase& seed, const sql::SchemaContext& schema,
                                         std::string_view target_dialect);

/// Statements found in model output (code fences stripped, comment-only
/// pieces dropped).
std::vector<std::string> extract_statements(std::string_view text);

/// LLM rewrite of `seed` into `target_dialect`. Refused, truncated, failed or
/// empty answers fall back to the seed's own statements. Never empty.
sql::SqlTestCase transfer_seed(const sql::SqlTestCase& seed, const sql::SchemaContext& schema, llm::Provider& llm,
                               std::string_view target_dialect);

/// Accepted statements over all statements, one execution per case.
Ratio semantic_correctness_ratio(const std::vector<sql::SqlTestCase>& corpus, sql::Executor& executor);

/// Writes the corpus file plus `<path>.lineage.json` mapping each case id to
/// its ancestor and origin.
void write_transferred_corpus(const std::string& path, const std::vector<sql::SqlTestCase>& cases);

}  // namespace dbfuzz::transfer
