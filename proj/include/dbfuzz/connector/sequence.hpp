#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dbfuzz/common/ratio.hpp"
#include "dbfuzz/connector/state_machine.hpp"

namespace dbfuzz::connector {

inline constexpr std::size_t kDefaultMaxLength = 15;

enum class SequenceSource { llm, enumerator, repaired };
std::string_view to_string(SequenceSource source);

struct ApiSequence {
  std::vector<std::string> calls;
  SequenceSource source = SequenceSource::llm;
  /// Non-empty iff validate_sequence accepted the calls.
  std::vector<TransitionRule> transition_path;
};

enum class ViolationKind { unknown_function, illegal_transition, not_from_initial, exceeds_length };
std::string_view to_string(ViolationKind kind);

struct ValidationReport {
  bool valid = false;
  std::optional<std::size_t> first_violation_index;
  std::optional<ViolationKind> violation_kind;
  std::string message;
  /// Rule indices of the accepted walk; empty when invalid.
  std::vector<std::size_t> rule_path;
};

/// Accepts iff the calls form a contiguous rule path from the initial state
/// within `max_len` calls. Nondeterministic machines are handled by tracking
/// every reachable state; the reported path is the first found in rule
/// declaration order.
ValidationReport validate_sequence(const ApiStateMachine& machine, const ApiSequence& sequence,
                                   std::size_t max_len = kDefaultMaxLength);

/// Returns `sequence` with transition_path filled from a fresh validation.
ApiSequence annotate(const ApiStateMachine& machine, ApiSequence sequence, std::size_t max_len = kDefaultMaxLength);

/// Adjacent rule pairs exercised by an accepted rule path.
std::set<TransitionPair> pairs_of(const std::vector<std::size_t>& rule_path);

/// Greedy coverage of transition pairs under a sequence budget. Each round
/// picks the walk covering the most new pairs (ties: shorter, then
/// lexicographically smaller calls). Once no walk adds coverage the
/// remaining budget is filled with unseen walks in shortlex order.
std::vector<ApiSequence> enumerate_sequences(const ApiStateMachine& machine, std::size_t max_len, std::size_t budget);

/// Fraction of sequences that validate. Throws PreconditionError on an
/// empty batch.
Ratio driver_correctness_ratio(const std::vector<ApiSequence>& batch, const ApiStateMachine& machine,
                               std::size_t max_len = kDefaultMaxLength);

/// Line-per-call driver text with arguments drawn round-robin from the value
/// pool of each parameter type.
std::string render_driver(const ApiStateMachine& machine, const ApiSequence& sequence);

}  // namespace dbfuzz::connector
