#pragma once

#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "dbfuzz/llm/provider.hpp"
#include "dbfuzz/monitor/log_event.hpp"

namespace dbfuzz::monitor {

enum class Provenance { llm_mined, handwritten };
std::string_view to_string(Provenance provenance);
std::optional<Provenance> parse_provenance(std::string_view text);

/// A log signature searched for anywhere in the message.
struct ErrorPattern {
  std::string id;
  std::string regex;
  std::string bug_class;
  Severity min_severity = Severity::error;
  Provenance provenance = Provenance::handwritten;
  std::shared_ptr<const std::regex> compiled;

  bool matches(const LogEvent& event) const;
};

/// Throws ParseError when the regex does not compile.
ErrorPattern make_pattern(std::string id, std::string regex, std::string bug_class, Severity min_severity,
                          Provenance provenance);

/// One JSON object per line: {"id","regex","class","min_severity","provenance"}.
/// Blank lines and lines starting with '#' are skipped. Throws ParseError
/// (with line number) on malformed records, bad regexes and duplicate ids.
std::vector<ErrorPattern> parse_catalog(std::string_view text);
std::vector<ErrorPattern> load_catalog(const std::string& path);
std::string render_catalog(const std::vector<ErrorPattern>& catalog);

/// Prompt listing up to `sample_limit` distinct error/fatal messages.
llm::PromptRequest build_mining_prompt(const std::vector<LogEvent>& log_corpus, std::size_t sample_limit = 50);

/// Regex candidates from model output: backtick spans when present, else one
/// per line. `class | severity | regex` triples set class and severity.
std::vector<ErrorPattern> parse_mined_patterns(std::string_view text);

/// Offline mining step. Returns an empty list when the corpus holds no
/// error-level message or the model gives no usable answer. Throws
/// PreconditionError on an empty corpus.
std::vector<ErrorPattern> mine_patterns(const std::vector<LogEvent>& log_corpus, llm::Provider& llm);

}  // namespace dbfuzz::monitor
