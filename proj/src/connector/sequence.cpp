#include "dbfuzz/connector/sequence.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <optional>

#include "dbfuzz/common/text.hpp"

namespace dbfuzz::connector {

std::string_view to_string(SequenceSource source) {
  switch (source) {
    case SequenceSource::llm: return "llm";
    case SequenceSource::enumerator: return "enumerator";
    case SequenceSource::repaired: return "repaired";
  }
  return "llm";
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::unknown_function: return "unknown_function";
    case ViolationKind::illegal_transition: return "illegal_transition";
    case ViolationKind::not_from_initial: return "not_from_initial";
    case ViolationKind::exceeds_length: return "exceeds_length";
  }
  return "illegal_transition";
}

namespace {

ValidationReport reject(std::size_t index, ViolationKind kind, std::string message) {
  ValidationReport r;
  r.first_violation_index = index;
  r.violation_kind = kind;
  r.message = "call #" + std::to_string(index) + ": " + message;
  return r;
}

struct Branch {
  std::string state;
  std::vector<std::size_t> path;
};

std::string states_of(const std::vector<Branch>& frontier) {
  std::vector<std::string> names;
  for (const auto& b : frontier) names.push_back("'" + b.state + "'");
  return join(names, " or ");
}

}  // namespace

ValidationReport validate_sequence(const ApiStateMachine& machine, const ApiSequence& sequence, std::size_t max_len) {
  if (sequence.calls.empty())
    return reject(0, ViolationKind::not_from_initial, "empty sequence does not leave the initial state '" +
                                                          machine.initial_state() + "'");
  std::vector<Branch> frontier{{machine.initial_state(), {}}};
  const auto& rules = machine.rules();
  for (std::size_t i = 0; i < sequence.calls.size(); ++i) {
    const std::string& call = sequence.calls[i];
    if (i >= max_len)
      return reject(i, ViolationKind::exceeds_length,
                    "sequence has " + std::to_string(sequence.calls.size()) + " calls, limit is " +
                        std::to_string(max_len));
    if (machine.find_function(call) == nullptr)
      return reject(i, ViolationKind::unknown_function, "'" + call + "' is not a declared function");
    std::vector<Branch> next;
    for (const auto& b : frontier) {
      for (std::size_t r : machine.rules_from(b.state)) {
        if (rules[r].via_function != call) continue;
        const bool seen = std::any_of(next.begin(), next.end(), [&](const Branch& n) { return n.state == rules[r].to_state; });
        if (seen) continue;
        Branch n{rules[r].to_state, b.path};
        n.path.push_back(r);
        next.push_back(std::move(n));
      }
    }
    if (next.empty()) {
      if (i == 0)
        return reject(0, ViolationKind::not_from_initial,
                      "'" + call + "' cannot be called in the initial state '" + machine.initial_state() + "'");
      return reject(i, ViolationKind::illegal_transition,
                    "'" + call + "' cannot be called in state " + states_of(frontier) + " after '" +
                        sequence.calls[i - 1] + "'");
    }
    frontier = std::move(next);
  }
  ValidationReport ok;
  ok.valid = true;
  ok.message = "valid";
  ok.rule_path = frontier.front().path;
  return ok;
}

ApiSequence annotate(const ApiStateMachine& machine, ApiSequence sequence, std::size_t max_len) {
  const ValidationReport report = validate_sequence(machine, sequence, max_len);
  sequence.transition_path.clear();
  for (std::size_t r : report.rule_path) sequence.transition_path.push_back(machine.rules()[r]);
  return sequence;
}

std::set<TransitionPair> pairs_of(const std::vector<std::size_t>& rule_path) {
  std::set<TransitionPair> out;
  for (std::size_t i = 1; i < rule_path.size(); ++i) out.insert({rule_path[i - 1], rule_path[i]});
  return out;
}

namespace {

// Successor rules of `rule`, ordered by (function, target state, index).
std::vector<std::size_t> successors(const ApiStateMachine& m, const std::string& state) {
  std::vector<std::size_t> out = m.rules_from(state);
  const auto& rules = m.rules();
  std::stable_sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) {
    if (rules[a].via_function != rules[b].via_function) return rules[a].via_function < rules[b].via_function;
    return rules[a].to_state < rules[b].to_state;
  });
  return out;
}

std::vector<std::string> calls_of(const ApiStateMachine& m, const std::vector<std::size_t>& path) {
  std::vector<std::string> out;
  for (std::size_t r : path) out.push_back(m.rules()[r].via_function);
  return out;
}

// Shortest extension from `last` ending in an uncovered pair, within `room` steps.
std::optional<std::vector<std::size_t>> nearest_uncovered(const ApiStateMachine& m, std::size_t last, std::size_t room,
                                                          const std::set<TransitionPair>& covered) {
  if (room == 0) return std::nullopt;
  std::map<std::size_t, std::size_t> parent;
  std::map<std::size_t, std::size_t> depth{{last, 0}};
  std::deque<std::size_t> queue{last};
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    if (depth[u] >= room) continue;
    for (std::size_t v : successors(m, m.rules()[u].to_state)) {
      if (!covered.count({u, v})) {
        std::vector<std::size_t> ext{v};
        for (std::size_t x = u; x != last; x = parent[x]) ext.push_back(x);
        std::reverse(ext.begin(), ext.end());
        return ext;
      }
      if (!depth.count(v)) {
        depth[v] = depth[u] + 1;
        parent[v] = u;
        queue.push_back(v);
      }
    }
  }
  return std::nullopt;
}

struct Candidate {
  std::vector<std::size_t> path;
  std::size_t gain = 0;
};

Candidate greedy_walk(const ApiStateMachine& m, std::size_t start, std::size_t max_len, const std::set<TransitionPair>& covered) {
  Candidate c{{start}, 0};
  std::set<TransitionPair> local = covered;
  while (c.path.size() < max_len) {
    auto ext = nearest_uncovered(m, c.path.back(), max_len - c.path.size(), local);
    if (!ext) break;
    std::size_t prev = c.path.back();
    for (std::size_t r : *ext) {
      if (local.insert({prev, r}).second) ++c.gain;
      c.path.push_back(r);
      prev = r;
    }
  }
  return c;
}

// Beam search over walks from `start`; catches detours the step-greedy walk
// misses when the nearest uncovered pair leads into a dead end.
Candidate beam_walk(const ApiStateMachine& m, std::size_t start, std::size_t max_len, const std::set<TransitionPair>& covered) {
  constexpr std::size_t kWidth = 128;
  struct Node {
    std::vector<std::size_t> path;
    std::set<TransitionPair> fresh;
  };
  Candidate best{{start}, 0};
  std::vector<Node> beam{{{start}, {}}};
  while (!beam.empty() && beam.front().path.size() < max_len) {
    std::vector<Node> next;
    std::set<std::pair<std::size_t, std::set<TransitionPair>>> signatures;
    for (const Node& n : beam)
      for (std::size_t v : successors(m, m.rules()[n.path.back()].to_state)) {
        Node child = n;
        const TransitionPair pair{n.path.back(), v};
        if (!covered.count(pair)) child.fresh.insert(pair);
        child.path.push_back(v);
        if (!signatures.emplace(v, child.fresh).second) continue;
        if (child.fresh.size() > best.gain) best = {child.path, child.fresh.size()};
        next.push_back(std::move(child));
      }
    std::stable_sort(next.begin(), next.end(), [](const Node& a, const Node& b) { return a.fresh.size() > b.fresh.size(); });
    if (next.size() > kWidth) next.resize(kWidth);
    beam = std::move(next);
  }
  return best;
}

void shortlex_fill(const ApiStateMachine& m, std::size_t max_len, std::size_t budget, std::set<std::vector<std::string>>& seen,
                   std::vector<ApiSequence>& out) {
  std::vector<std::size_t> path;
  std::vector<std::string> calls;
  // Depth-limited DFS; returns false once the budget is spent.
  auto dfs = [&](auto&& self, const std::string& state, std::size_t target) -> bool {
    if (calls.size() == target) {
      if (seen.insert(calls).second) {
        ApiSequence s{calls, SequenceSource::enumerator, {}};
        for (std::size_t r : path) s.transition_path.push_back(m.rules()[r]);
        out.push_back(std::move(s));
      }
      return out.size() < budget;
    }
    for (std::size_t r : successors(m, state)) {
      path.push_back(r);
      calls.push_back(m.rules()[r].via_function);
      const bool more = self(self, m.rules()[r].to_state, target);
      path.pop_back();
      calls.pop_back();
      if (!more) return false;
    }
    return true;
  };
  for (std::size_t len = 1; len <= max_len && out.size() < budget; ++len)
    if (!dfs(dfs, m.initial_state(), len)) break;
}

}  // namespace

std::vector<ApiSequence> enumerate_sequences(const ApiStateMachine& machine, std::size_t max_len, std::size_t budget) {
  if (max_len == 0 || budget == 0) throw PreconditionError("enumerate_sequences needs max_len >= 1 and budget >= 1");
  std::vector<ApiSequence> out;
  std::set<std::vector<std::string>> seen;
  std::set<TransitionPair> covered;
  const std::vector<std::size_t> starts = successors(machine, machine.initial_state());

  while (out.size() < budget) {
    std::optional<Candidate> best;
    std::vector<std::string> best_calls;
    for (std::size_t s : starts) {
      Candidate c = greedy_walk(machine, s, max_len, covered);
      if (Candidate b = beam_walk(machine, s, max_len, covered); b.gain > c.gain) c = std::move(b);
      if (c.gain == 0) continue;
      std::vector<std::string> calls = calls_of(machine, c.path);
      const bool better = !best || c.gain > best->gain ||
                          (c.gain == best->gain && (c.path.size() < best->path.size() ||
                                                    (c.path.size() == best->path.size() && calls < best_calls)));
      if (better) {
        best = std::move(c);
        best_calls = std::move(calls);
      }
    }
    if (!best) break;
    if (!seen.insert(best_calls).second) break;
    for (const auto& p : pairs_of(best->path)) covered.insert(p);
    ApiSequence seq{best_calls, SequenceSource::enumerator, {}};
    for (std::size_t r : best->path) seq.transition_path.push_back(machine.rules()[r]);
    out.push_back(std::move(seq));
  }
  if (out.size() < budget) shortlex_fill(machine, max_len, budget, seen, out);
  return out;
}

Ratio driver_correctness_ratio(const std::vector<ApiSequence>& batch, const ApiStateMachine& machine, std::size_t max_len) {
  if (batch.empty()) throw PreconditionError("driver correctness ratio of an empty batch");
  Ratio r{0, batch.size()};
  for (const auto& s : batch)
    if (validate_sequence(machine, s, max_len).valid) ++r.numerator;
  return r;
}

std::string render_driver(const ApiStateMachine& machine, const ApiSequence& sequence) {
  std::map<std::string, std::size_t> cursor;
  std::string out;
  for (const auto& call : sequence.calls) {
    out += call + "(";
    if (const FunctionPrototype* p = machine.find_function(call)) {
      for (std::size_t i = 0; i < p->param_types.size(); ++i) {
        if (i) out += ", ";
        const auto pool = machine.value_pools().find(p->param_types[i]);
        if (pool == machine.value_pools().end() || pool->second.empty()) {
          out += "null";
        } else {
          std::size_t& c = cursor[p->param_types[i]];
          out += pool->second[c % pool->second.size()];
          ++c;
        }
      }
    }
    out += ")\n";
  }
  return out;
}

}  // namespace dbfuzz::connector
