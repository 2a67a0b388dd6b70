#include "dbfuzz/connector/state_machine.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include <json.hpp>

#include "dbfuzz/common/text.hpp"

namespace dbfuzz::connector {

namespace {

using Json = nlohmann::json;

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

const Json& require(const Json& obj, const char* key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) throw ParseError(0, path + "." + key, "missing");
  return obj.at(key);
}

std::string string_at(const Json& obj, const char* key, const std::string& path) {
  const Json& v = require(obj, key, path);
  if (!v.is_string()) throw ParseError(0, path + "." + key, "must be a string");
  return v.get<std::string>();
}

std::vector<std::string> strings_at(const Json& v, const std::string& path) {
  if (!v.is_array()) throw ParseError(0, path, "must be an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) throw ParseError(0, path + "[" + std::to_string(i) + "]", "must be a string");
    out.push_back(v[i].get<std::string>());
  }
  return out;
}

}  // namespace

const FunctionPrototype* ApiStateMachine::find_function(std::string_view name) const {
  for (const auto& p : prototypes_)
    if (p.name == name) return &p;
  return nullptr;
}

bool ApiStateMachine::has_state(std::string_view state) const {
  return std::find(states_.begin(), states_.end(), state) != states_.end();
}

const std::vector<std::size_t>& ApiStateMachine::rules_from(const std::string& state) const {
  static const std::vector<std::size_t> kNone;
  const auto it = outgoing_.find(state);
  return it == outgoing_.end() ? kNone : it->second;
}

std::vector<TransitionPair> ApiStateMachine::all_pairs() const {
  std::vector<TransitionPair> out;
  for (std::size_t a = 0; a < rules_.size(); ++a)
    for (std::size_t b : rules_from(rules_[a].to_state)) out.push_back({a, b});
  std::sort(out.begin(), out.end());
  return out;
}

std::string ApiStateMachine::render_pair(const TransitionPair& pair) const {
  return rules_.at(pair.first).render() + " then " + rules_.at(pair.second).render();
}

void ApiStateMachine::index() {
  outgoing_.clear();
  for (std::size_t i = 0; i < rules_.size(); ++i) outgoing_[rules_[i].from_state].push_back(i);
}

ApiStateMachine load_state_machine(std::string_view document) {
  Json doc;
  try {
    doc = Json::parse(document);
  } catch (const Json::parse_error& e) {
    throw ParseError(line_of(document, e.byte == 0 ? 0 : e.byte - 1), "", e.what());
  }
  if (!doc.is_object()) throw ParseError(1, "", "state machine document must be a JSON object");

  ApiStateMachine m;
  m.name_ = doc.value("name", "connector");

  const Json& states = require(doc, "states", "$");
  m.initial_ = string_at(states, "initial", "states");
  m.terminal_ = states.contains("terminal") ? strings_at(states.at("terminal"), "states.terminal") : std::vector<std::string>{};
  m.states_ = strings_at(require(states, "all", "states"), "states.all");
  {
    std::set<std::string> seen;
    std::vector<std::string> dups;
    for (const auto& s : m.states_)
      if (!seen.insert(s).second) dups.push_back(s);
    if (!dups.empty())
      throw StateMachineError(StateMachineError::Kind::duplicate_state, dups, "duplicate states: " + join(dups, ", "));
  }
  std::vector<std::string> unknown_states;
  if (!m.has_state(m.initial_)) unknown_states.push_back(m.initial_);
  for (const auto& t : m.terminal_)
    if (!m.has_state(t)) unknown_states.push_back(t);

  const Json& functions = require(doc, "functions", "$");
  if (!functions.is_array()) throw ParseError(0, "functions", "must be an array");
  std::vector<std::string> duplicate_functions;
  for (std::size_t i = 0; i < functions.size(); ++i) {
    const std::string path = "functions[" + std::to_string(i) + "]";
    const Json& f = functions[i];
    FunctionPrototype p;
    p.name = string_at(f, "name", path);
    p.param_types = f.contains("params") ? strings_at(f.at("params"), path + ".params") : std::vector<std::string>{};
    p.return_type = f.value("returns", "void");
    p.state_description = f.value("description", "");
    if (m.find_function(p.name) != nullptr) duplicate_functions.push_back(p.name);
    m.prototypes_.push_back(std::move(p));
  }
  if (!duplicate_functions.empty())
    throw StateMachineError(StateMachineError::Kind::duplicate_function, duplicate_functions,
                            "duplicate function prototypes: " + join(duplicate_functions, ", "));

  const Json& rules = require(doc, "rules", "$");
  if (!rules.is_array()) throw ParseError(0, "rules", "must be an array");
  std::vector<std::string> dangling;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const std::string path = "rules[" + std::to_string(i) + "]";
    TransitionRule r{string_at(rules[i], "from", path), string_at(rules[i], "via", path), string_at(rules[i], "to", path)};
    if (!m.has_state(r.from_state)) unknown_states.push_back(r.from_state);
    if (!m.has_state(r.to_state)) unknown_states.push_back(r.to_state);
    if (m.find_function(r.via_function) == nullptr) dangling.push_back(r.via_function);
    m.rules_.push_back(std::move(r));
  }
  if (!unknown_states.empty())
    throw StateMachineError(StateMachineError::Kind::unknown_state, unknown_states,
                            "undeclared states: " + join(unknown_states, ", "));
  if (!dangling.empty())
    throw StateMachineError(StateMachineError::Kind::dangling_function, dangling,
                            "rules reference undeclared functions: " + join(dangling, ", "));

  if (doc.contains("value_pools")) {
    const Json& pools = doc.at("value_pools");
    if (!pools.is_object()) throw ParseError(0, "value_pools", "must be an object");
    for (const auto& [type, values] : pools.items()) m.value_pools_[type] = strings_at(values, "value_pools." + type);
  }

  m.index();
  if (m.rules_from(m.initial_).empty())
    throw StateMachineError(StateMachineError::Kind::no_initial_rule, {m.initial_},
                            "no rule leaves the initial state '" + m.initial_ + "'");

  std::set<std::string> reached{m.initial_};
  std::deque<std::string> queue{m.initial_};
  while (!queue.empty()) {
    const std::string s = queue.front();
    queue.pop_front();
    for (std::size_t r : m.rules_from(s))
      if (reached.insert(m.rules_[r].to_state).second) queue.push_back(m.rules_[r].to_state);
  }
  std::vector<std::string> unreachable;
  for (const auto& s : m.states_)
    if (!reached.count(s)) unreachable.push_back(s);
  if (!unreachable.empty())
    throw StateMachineError(StateMachineError::Kind::unreachable_state, unreachable,
                            "states unreachable from '" + m.initial_ + "': " + join(unreachable, ", "));
  return m;
}

ApiStateMachine load_state_machine_file(const std::string& path) { return load_state_machine(read_file(path)); }

}  // namespace dbfuzz::connector
