#include "dbfuzz/connector/synthesis.hpp"

#include <cctype>
#include <set>

#include "dbfuzz/common/text.hpp"

namespace dbfuzz::connector {

namespace {

std::string describe_machine(const ApiStateMachine& m) {
  std::string out = "Functions:\n";
  for (const auto& p : m.prototypes()) {
    out += "- " + p.return_type + " " + p.name + "(" + join(p.param_types, ", ") + ")";
    if (!p.state_description.empty()) out += ": " + p.state_description;
    out += "\n";
  }
  out += "\nState-transition rules (initial state '" + m.initial_state() + "'):\n";
  for (const auto& r : m.rules()) out += "- " + r.render() + "\n";
  return out;
}

std::string instruction(std::size_t max_len) {
  return "Based on the state-transition rules and state description of functions, please generate a sequence of "
         "APIS within length " +
         std::to_string(max_len) + ". It is required to cover a different combination of state transitions than before.";
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string_view first_fenced_block(std::string_view text) {
  const auto open = text.find("```");
  if (open == std::string_view::npos) return text;
  auto body = text.find('\n', open);
  if (body == std::string_view::npos) return {};
  ++body;
  const auto close = text.find("```", body);
  return text.substr(body, close == std::string_view::npos ? std::string_view::npos : close - body);
}

}  // namespace

llm::PromptRequest build_synthesis_prompt(const ApiStateMachine& machine, std::size_t max_len,
                                          const std::set<TransitionPair>& covered_history) {
  llm::PromptRequest req;
  req.system_text = "You write fuzz drivers for the '" + machine.name() + "' connector API as ordered call lists.";
  req.user_text = describe_machine(machine);
  req.user_text += "\nAlready covered transition combinations:\n";
  if (covered_history.empty()) req.user_text += "- none\n";
  for (const auto& pair : covered_history) req.user_text += "- " + machine.render_pair(pair) + "\n";
  req.user_text += "\n" + instruction(max_len) + "\nAnswer with one function name per line.\n";
  req.tag = "driver-synth";
  return req;
}

llm::PromptRequest build_repair_prompt(const ApiStateMachine& machine, const ApiSequence& sequence,
                                       const ValidationReport& report, std::size_t max_len) {
  llm::PromptRequest req;
  req.system_text = "You fix fuzz drivers for the '" + machine.name() + "' connector API.";
  req.user_text = describe_machine(machine);
  req.user_text += "\nCandidate sequence:\n";
  for (const auto& c : sequence.calls) req.user_text += c + "\n";
  req.user_text += "\nValidator error: " + report.message + "\n";
  req.user_text += "\nFix the API sequence so that every call follows the state-transition rules from the initial "
                   "state, within length " +
                   std::to_string(max_len) + ". Answer with one function name per line.\n";
  req.tag = "driver-repair";
  return req;
}

ApiSequence parse_llm_sequence(std::string_view text, const ApiStateMachine& machine) {
  const std::string_view body = first_fenced_block(text);
  struct Hit {
    std::string name;
    bool call_syntax;
  };
  std::vector<Hit> hits;
  for (std::size_t i = 0; i < body.size();) {
    if (!ident_start(body[i]) || (i > 0 && ident_char(body[i - 1]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < body.size() && ident_char(body[j])) ++j;
    std::string word(body.substr(i, j - i));
    if (machine.find_function(word) != nullptr) {
      std::size_t k = j;
      while (k < body.size() && (body[k] == ' ' || body[k] == '\t')) ++k;
      hits.push_back({std::move(word), k < body.size() && body[k] == '('});
    }
    i = j;
  }
  const bool any_call = std::any_of(hits.begin(), hits.end(), [](const Hit& h) { return h.call_syntax; });
  ApiSequence seq;
  seq.source = SequenceSource::llm;
  for (auto& h : hits)
    if (!any_call || h.call_syntax) seq.calls.push_back(std::move(h.name));
  return seq;
}

RepairOutcome repair_loop(const ApiStateMachine& machine, const ApiSequence& sequence, llm::Provider& llm,
                          std::size_t max_iters, std::size_t max_len) {
  RepairOutcome out{annotate(machine, sequence, max_len), 0, false};
  ValidationReport report = validate_sequence(machine, out.sequence, max_len);
  if (report.valid) {
    out.sequence = sequence;
    return out;
  }
  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    const llm::PromptResponse resp = llm.complete(build_repair_prompt(machine, out.sequence, report, max_len));
    ++out.llm_calls;
    out.sequence.source = SequenceSource::repaired;
    if (resp.finish_reason == llm::FinishReason::transport_error) {
      out.transport_failed = true;
      break;
    }
    ApiSequence candidate = parse_llm_sequence(resp.text, machine);
    if (!candidate.calls.empty()) {
      candidate.source = SequenceSource::repaired;
      out.sequence = annotate(machine, std::move(candidate), max_len);
    }
    report = validate_sequence(machine, out.sequence, max_len);
    if (report.valid) break;
  }
  return out;
}

}  // namespace dbfuzz::connector
