#pragma once

#include <map>
#include <string>
#include <vector>

#include "dbfuzz/monitor/anomaly.hpp"
#include "dbfuzz/sql/types.hpp"

namespace dbfuzz::monitor {

/// On-disk layout, one directory per dedup key:
///
///   <root>/<key>/report.json   first event, count, lineage ids, triage verdict
///   <root>/<key>/case-N.sql    reproducing test cases, when known
///
/// Saving keeps any triage verdict already on disk, so re-running a campaign
/// into the same directory never forgets human review.
void save_bug_reports(const std::string& root, const std::vector<BugReport>& reports,
                      const std::map<std::string, sql::SqlTestCase>& cases_by_context);

std::vector<BugReport> load_bug_reports(const std::string& root);

/// Persists a verdict. `id` may be a full key or a unique prefix of one.
/// Throws NotFound for unknown or ambiguous ids.
BugReport triage_bug(const std::string& root, const std::string& id, Triage verdict);

struct BugCounts {
  std::size_t reported = 0;
  std::size_t real = 0;
  std::size_t false_positive = 0;
};
BugCounts count_bugs(const std::vector<BugReport>& reports);

}  // namespace dbfuzz::monitor
