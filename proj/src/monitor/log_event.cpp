#include "dbfuzz/monitor/log_event.hpp"

#include <regex>

#include "dbfuzz/common/text.hpp"

namespace dbfuzz::monitor {

std::string_view to_string(Severity severity) {
  switch (severity) {
    case Severity::debug: return "debug";
    case Severity::info: return "info";
    case Severity::warn: return "warn";
    case Severity::error: return "error";
    case Severity::fatal: return "fatal";
  }
  return "info";
}

std::optional<Severity> parse_severity(std::string_view text) {
  const std::string t = to_lower(trim(text));
  if (t == "debug") return Severity::debug;
  if (t == "info") return Severity::info;
  if (t == "warn" || t == "warning") return Severity::warn;
  if (t == "error") return Severity::error;
  if (t == "fatal") return Severity::fatal;
  return std::nullopt;
}

LogEvent parse_log_line(std::string_view line) {
  static const std::regex kLine(R"(^(\d+) (DEBUG|INFO|WARN|ERROR|FATAL) \[([^\]]+)\](?: \{case=([^}]*)\})? (.+)$)");
  std::string text(line);
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  LogEvent e;
  std::smatch m;
  if (std::regex_match(text, m, kLine)) {
    e.timestamp = std::stoull(m[1].str());
    e.severity = *parse_severity(m[2].str());
    e.component = m[3].str();
    if (m[4].matched && !m[4].str().empty()) {
      e.case_context = m[4].str();
      const auto at = e.case_context->find('@');
      e.case_lineage = e.case_context->substr(0, at);
    }
    e.message = m[5].str();
    return e;
  }
  e.parsed = false;
  e.severity = Severity::info;
  e.component = "raw";
  e.message = trim(text).empty() ? std::string("(blank line)") : text;
  return e;
}

}  // namespace dbfuzz::monitor
