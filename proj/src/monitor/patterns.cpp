#include "dbfuzz/monitor/patterns.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <json.hpp>

#include "dbfuzz/common/error.hpp"
#include "dbfuzz/common/hash.hpp"
#include "dbfuzz/common/text.hpp"

namespace dbfuzz::monitor {

std::string_view to_string(Provenance provenance) {
  return provenance == Provenance::llm_mined ? "llm_mined" : "handwritten";
}

std::optional<Provenance> parse_provenance(std::string_view text) {
  if (text == "llm_mined") return Provenance::llm_mined;
  if (text == "handwritten") return Provenance::handwritten;
  return std::nullopt;
}

bool ErrorPattern::matches(const LogEvent& event) const {
  return event.severity >= min_severity && compiled && std::regex_search(event.message, *compiled);
}

ErrorPattern make_pattern(std::string id, std::string regex, std::string bug_class, Severity min_severity,
                          Provenance provenance) {
  ErrorPattern p{std::move(id), std::move(regex), std::move(bug_class), min_severity, provenance, nullptr};
  try {
    p.compiled = std::make_shared<const std::regex>(p.regex, std::regex::ECMAScript | std::regex::optimize);
  } catch (const std::regex_error& e) {
    throw ParseError(0, "regex", "pattern '" + p.regex + "' does not compile: " + e.what());
  }
  return p;
}

std::vector<ErrorPattern> parse_catalog(std::string_view text) {
  std::vector<ErrorPattern> out;
  std::set<std::string> ids;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const std::string_view line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line_no, "", e.what());
    }
    auto field = [&](const char* key) -> std::string {
      if (!j.contains(key) || !j.at(key).is_string()) throw ParseError(line_no, key, "missing or not a string");
      return j.at(key).get<std::string>();
    };
    const std::string severity_text = j.value("min_severity", "error");
    const auto severity = parse_severity(severity_text);
    if (!severity) throw ParseError(line_no, "min_severity", "unknown severity '" + severity_text + "'");
    const std::string provenance_text = j.value("provenance", "handwritten");
    const auto provenance = parse_provenance(provenance_text);
    if (!provenance) throw ParseError(line_no, "provenance", "unknown provenance '" + provenance_text + "'");
    std::string id = field("id");
    if (!ids.insert(id).second) throw ParseError(line_no, "id", "duplicate pattern id '" + id + "'");
    try {
      out.push_back(make_pattern(std::move(id), field("regex"), j.value("class", "unclassified"), *severity, *provenance));
    } catch (const ParseError& e) {
      throw ParseError(line_no, "regex", e.what());
    }
  }
  return out;
}

std::vector<ErrorPattern> load_catalog(const std::string& path) { return parse_catalog(read_file(path)); }

std::string render_catalog(const std::vector<ErrorPattern>& catalog) {
  std::string out;
  for (const auto& p : catalog) {
    nlohmann::ordered_json j{{"id", p.id},
                             {"regex", p.regex},
                             {"class", p.bug_class},
                             {"min_severity", std::string(to_string(p.min_severity))},
                             {"provenance", std::string(to_string(p.provenance))}};
    out += j.dump() + "\n";
  }
  return out;
}

llm::PromptRequest build_mining_prompt(const std::vector<LogEvent>& log_corpus, std::size_t sample_limit) {
  std::vector<std::string> sample;
  std::set<std::string> seen;
  for (const auto& e : log_corpus) {
    if (e.severity < Severity::error || sample.size() >= sample_limit) continue;
    std::string shape = e.message;
    for (char& c : shape)
      if (std::isdigit(static_cast<unsigned char>(c))) c = '0';
    if (seen.insert(shape).second) sample.push_back("[" + std::string(to_string(e.severity)) + "] " + e.message);
  }
  llm::PromptRequest req;
  req.system_text = "You analyse database server logs for signs of internal failures.";
  req.user_text = "Error-level messages observed while testing a database engine:\n";
  for (const auto& s : sample) req.user_text += "- " + s + "\n";
  req.user_text += "\nIdentify the error patterns that indicate a bug inside the engine rather than a rejected query. "
                   "Give one ECMAScript regular expression per line, optionally written as "
                   "`class | severity | regex`.\n";
  req.tag = "pattern-mine";
  return req;
}

namespace {

std::string strip_list_marker(std::string_view line) {
  line = trim(line);
  if (line.size() >= 2 && (line[0] == '-' || line[0] == '*') && line[1] == ' ') return std::string(trim(line.substr(2)));
  std::size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i > 0 && i + 1 < line.size() && (line[i] == '.' || line[i] == ')') && line[i + 1] == ' ')
    return std::string(trim(line.substr(i + 2)));
  return std::string(line);
}

}  // namespace

std::vector<ErrorPattern> parse_mined_patterns(std::string_view text) {
  std::vector<std::string> candidates;
  std::string_view rest = text;
  bool spans = false;
  for (;;) {
    const auto open = rest.find('`');
    if (open == std::string_view::npos) break;
    if (rest.substr(open, 3) == "```") {
      // Fenced block: every line inside is a candidate.
      const auto body = rest.find('\n', open);
      const auto close = rest.find("```", open + 3);
      if (body == std::string_view::npos || close == std::string_view::npos || close < body) break;
      for (const auto& line : split_lines(rest.substr(body + 1, close - body - 1)))
        if (!trim(line).empty()) candidates.push_back(strip_list_marker(line));
      rest = rest.substr(close + 3);
      spans = true;
      continue;
    }
    const auto close = rest.find('`', open + 1);
    if (close == std::string_view::npos) break;
    candidates.emplace_back(rest.substr(open + 1, close - open - 1));
    rest = rest.substr(close + 1);
    spans = true;
  }
  if (!spans)
    for (const auto& line : split_lines(text))
      if (!trim(line).empty()) candidates.push_back(strip_list_marker(line));

  std::vector<ErrorPattern> out;
  std::set<std::string> regexes;
  for (const auto& candidate : candidates) {
    std::string bug_class = "llm-mined";
    Severity severity = Severity::error;
    std::string regex = candidate;
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t bar; (bar = candidate.find(" | ", start)) != std::string::npos && parts.size() < 2; start = bar + 3)
      parts.emplace_back(trim(std::string_view(candidate).substr(start, bar - start)));
    if (parts.size() == 2) {
      if (const auto s = parse_severity(parts[1])) {
        bug_class = parts[0];
        severity = *s;
        regex = std::string(trim(std::string_view(candidate).substr(start)));
      }
    }
    if (regex.empty() || !regexes.insert(regex).second) continue;
    try {
      out.push_back(make_pattern("mined-" + content_hash(regex).substr(0, 8), regex, bug_class, severity,
                                 Provenance::llm_mined));
    } catch (const ParseError&) {
      regexes.erase(regex);
    }
  }
  return out;
}

std::vector<ErrorPattern> mine_patterns(const std::vector<LogEvent>& log_corpus, llm::Provider& llm) {
  if (log_corpus.empty()) throw PreconditionError("pattern mining needs a non-empty log corpus");
  const bool any_error =
      std::any_of(log_corpus.begin(), log_corpus.end(), [](const LogEvent& e) { return e.severity >= Severity::error; });
  if (!any_error) return {};
  const llm::PromptResponse resp = llm.complete(build_mining_prompt(log_corpus));
  if (!resp.ok() && resp.finish_reason != llm::FinishReason::truncated) return {};
  return parse_mined_patterns(resp.text);
}

}  // namespace dbfuzz::monitor
