#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dbfuzz/monitor/patterns.hpp"

namespace dbfuzz::monitor {

enum class Triage { unreviewed, real, false_positive };
std::string_view to_string(Triage triage);
std::optional<Triage> parse_triage(std::string_view text);

struct Anomaly {
  std::string pattern_id;
  std::string bug_class;
  LogEvent event;
  std::string dedup_key;
  Triage triage = Triage::unreviewed;
};

/// Hex runs (0x-prefixed, or 8+ hex digits containing a digit) become '@',
/// digit runs become '#', whitespace runs collapse to one space.
std::string normalize_message(std::string_view message);
std::string dedup_key(std::string_view pattern_id, std::string_view message);

/// One anomaly per matching pattern, ordered by pattern id.
std::vector<Anomaly> match_patterns(const LogEvent& event, const std::vector<ErrorPattern>& catalog);

inline constexpr std::size_t kMaxContextsPerReport = 32;

struct BugReport {
  std::string dedup_key;
  std::string pattern_id;
  std::string bug_class;
  LogEvent first_event;
  std::uint64_t count = 0;
  /// Distinct, in first-seen order.
  std::vector<std::string> lineage_ids;
  /// First kMaxContextsPerReport contexts only.
  std::vector<std::string> case_contexts;
  Triage triage = Triage::unreviewed;
};

/// One report per dedup key, in first-seen order.
std::vector<BugReport> dedup_and_report(const std::vector<Anomaly>& anomalies);

}  // namespace dbfuzz::monitor
