#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace dbfuzz::monitor {

enum class Severity { debug, info, warn, error, fatal };
std::string_view to_string(Severity severity);
/// Accepts the level words used in log lines and catalogs (case-insensitive;
/// WARNING is an alias of WARN).
std::optional<Severity> parse_severity(std::string_view text);

struct LogEvent {
  std::uint64_t timestamp = 0;
  Severity severity = Severity::info;
  std::string component;
  std::string message;  // never empty
  /// Corpus ancestor of the case that produced the line.
  std::optional<std::string> case_lineage;
  /// Full case context (`<lineage>@<entry>`) when present.
  std::optional<std::string> case_context;
  bool parsed = true;
};

/// Parses `<clock> <LEVEL> [<component>] {case=<ctx>} <message>`; any other
/// line becomes an unparsed info event carrying the raw text.
LogEvent parse_log_line(std::string_view line);

}  // namespace dbfuzz::monitor
