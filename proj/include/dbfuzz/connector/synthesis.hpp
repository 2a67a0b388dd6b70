#pragma once

#include <set>
#include <string>
#include <vector>

#include "dbfuzz/connector/sequence.hpp"
#include "dbfuzz/llm/provider.hpp"

namespace dbfuzz::connector {

inline constexpr std::size_t kDefaultRepairIterations = 3;

/// Prompt asking for a new call sequence. Embeds every prototype with its
/// state description, every rule, the instruction with `max_len` filled in
/// and the transition pairs already covered.
llm::PromptRequest build_synthesis_prompt(const ApiStateMachine& machine, std::size_t max_len,
                                          const std::set<TransitionPair>& covered_history);

/// Prompt asking to fix `sequence`, quoting the validator's message.
llm::PromptRequest build_repair_prompt(const ApiStateMachine& machine, const ApiSequence& sequence,
                                       const ValidationReport& report, std::size_t max_len);

/// Extracts the first plausible call list from free-form model output. Only
/// the first fenced code block is read when one exists; when any known name is
/// written with call syntax `name(`, only those occurrences count. Never
/// throws; garbage yields an empty sequence.
ApiSequence parse_llm_sequence(std::string_view text, const ApiStateMachine& machine);

struct RepairOutcome {
  ApiSequence sequence;
  std::size_t llm_calls = 0;
  bool transport_failed = false;
};

/// Validate, then up to `max_iters` rounds of repair prompt -> re-parse. Stops
/// on the first valid candidate or on a transport error. Empty parses keep the
/// previous candidate.
RepairOutcome repair_loop(const ApiStateMachine& machine, const ApiSequence& sequence, llm::Provider& llm,
                          std::size_t max_iters = kDefaultRepairIterations, std::size_t max_len = kDefaultMaxLength);

}  // namespace dbfuzz::connector
