#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dbfuzz/common/rng.hpp"
#include "dbfuzz/sql/parser.hpp"
#include "dbfuzz/sql/types.hpp"

namespace dbfuzz::mutation {

enum class OpKind { token_replace, clause_swap, literal_perturb, statement_duplicate, statement_delete, schema_aware_rename };
std::string_view to_string(OpKind kind);

struct MutationOp {
  std::string name;
  OpKind kind;
};

const std::vector<MutationOp>& mutation_ops();

struct CorpusEntry {
  std::string id;
  sql::SqlTestCase test_case;
  std::vector<std::uint32_t> fingerprint;  // sorted; fixed after the first execution
  double energy = 1.0;
  std::uint64_t executions = 0;
  bool executed = false;
};

struct MutationParams {
  std::size_t max_ops = 4;
  /// Attempts per op slot before giving up on it.
  std::size_t attempts = 8;
};

struct Mutant {
  sql::SqlTestCase test_case;
  std::vector<OpKind> applied;
};

/// Applies 1..max_ops operators to the visible (masked) form of the entry's
/// case and unmasks the result. Every intermediate statement is re-parsed;
/// edits that do not parse are reverted. Deterministic in (entry, seed, schema).
Mutant mutate_with_trace(const CorpusEntry& entry, std::uint64_t rng_seed, const sql::SchemaContext& schema,
                         const MutationParams& params = {});
sql::SqlTestCase mutate(const CorpusEntry& entry, std::uint64_t rng_seed, const sql::SchemaContext& schema,
                        const MutationParams& params = {});

/// Single operator applied to one statement; nullopt when it does not apply.
/// Exposed for tests.
std::optional<std::string> apply_to_statement(OpKind kind, std::string_view statement, Rng& rng,
                                              const sql::SchemaContext& schema);

/// Identifiers (lower-cased, non-keyword) appearing in `text`.
std::set<std::string> identifiers_in(std::string_view text);

}  // namespace dbfuzz::mutation
