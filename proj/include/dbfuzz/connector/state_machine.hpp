#pragma once

#include <compare>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dbfuzz/common/error.hpp"

namespace dbfuzz::connector {

struct FunctionPrototype {
  std::string name;
  std::vector<std::string> param_types;
  std::string return_type;
  std::string state_description;
};

struct TransitionRule {
  std::string from_state;
  std::string via_function;
  std::string to_state;

  std::string render() const { return from_state + " --" + via_function + "--> " + to_state; }
  friend bool operator==(const TransitionRule&, const TransitionRule&) = default;
};

/// Ordered pair of adjacent rules (indices into ApiStateMachine::rules()); the
/// coverage unit for "a different combination of state transitions".
struct TransitionPair {
  std::size_t first = 0;
  std::size_t second = 0;
  friend auto operator<=>(const TransitionPair&, const TransitionPair&) = default;
};

class StateMachineError : public Error {
 public:
  enum class Kind { unknown_state, dangling_function, duplicate_function, duplicate_state, unreachable_state, no_initial_rule };

  StateMachineError(Kind kind, std::vector<std::string> offenders, const std::string& message)
      : Error(message), kind_(kind), offenders_(std::move(offenders)) {}
  Kind kind() const noexcept { return kind_; }
  const std::vector<std::string>& offenders() const noexcept { return offenders_; }

 private:
  Kind kind_;
  std::vector<std::string> offenders_;
};

/// Connector API model: states, prototypes, transition rules and per-type
/// argument value pools. Immutable once loaded.
///
/// Document schema (JSON):
///   {
///     "name": "jdbc",
///     "states": {"initial": "init", "terminal": ["closed"], "all": ["init", ...]},
///     "functions": [{"name": "getConnection", "params": ["url"], "returns": "Connection",
///                    "description": "..."}],
///     "rules": [{"from": "init", "via": "getConnection", "to": "connected"}],
///     "value_pools": {"url": ["\"jdbc:mini://localhost/test\""]}
///   }
class ApiStateMachine {
 public:
  const std::string& name() const { return name_; }
  const std::vector<std::string>& states() const { return states_; }
  const std::string& initial_state() const { return initial_; }
  const std::vector<std::string>& terminal_states() const { return terminal_; }
  const std::vector<FunctionPrototype>& prototypes() const { return prototypes_; }
  const std::vector<TransitionRule>& rules() const { return rules_; }
  const std::map<std::string, std::vector<std::string>>& value_pools() const { return value_pools_; }

  const FunctionPrototype* find_function(std::string_view name) const;
  bool has_state(std::string_view state) const;
  /// Rule indices leaving `state`, in declaration order.
  const std::vector<std::size_t>& rules_from(const std::string& state) const;
  /// Every adjacent rule pair the machine admits, sorted.
  std::vector<TransitionPair> all_pairs() const;
  std::string render_pair(const TransitionPair& pair) const;

 private:
  friend ApiStateMachine load_state_machine(std::string_view document);
  void index();

  std::string name_;
  std::vector<std::string> states_;
  std::string initial_;
  std::vector<std::string> terminal_;
  std::vector<FunctionPrototype> prototypes_;
  std::vector<TransitionRule> rules_;
  std::map<std::string, std::vector<std::string>> value_pools_;
  std::map<std::string, std::vector<std::size_t>> outgoing_;
};

/// Throws ParseError (syntax, with line; or missing/ill-typed field) or
/// StateMachineError (structural invariant).
ApiStateMachine load_state_machine(std::string_view document);
ApiStateMachine load_state_machine_file(const std::string& path);

}  // namespace dbfuzz::connector
