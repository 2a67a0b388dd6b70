#include "dbfuzz/monitor/bug_store.hpp"

#include <algorithm>
#include <filesystem>

#include <json.hpp>

#include "dbfuzz/common/error.hpp"
#include "dbfuzz/common/text.hpp"
#include "dbfuzz/sql/corpus_io.hpp"

namespace dbfuzz::monitor {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

ordered_json event_json(const LogEvent& e) {
  ordered_json j{{"timestamp", e.timestamp},
                 {"severity", std::string(to_string(e.severity))},
                 {"component", e.component},
                 {"message", e.message}};
  if (e.case_lineage) j["case_lineage"] = *e.case_lineage;
  if (e.case_context) j["case_context"] = *e.case_context;
  return j;
}

LogEvent event_from(const nlohmann::json& j) {
  LogEvent e;
  e.timestamp = j.at("timestamp").get<std::uint64_t>();
  e.severity = parse_severity(j.at("severity").get<std::string>()).value_or(Severity::info);
  e.component = j.at("component").get<std::string>();
  e.message = j.at("message").get<std::string>();
  if (j.contains("case_lineage")) e.case_lineage = j.at("case_lineage").get<std::string>();
  if (j.contains("case_context")) e.case_context = j.at("case_context").get<std::string>();
  e.parsed = true;
  return e;
}

ordered_json report_json(const BugReport& r) {
  return ordered_json{{"dedup_key", r.dedup_key},
                      {"pattern_id", r.pattern_id},
                      {"bug_class", r.bug_class},
                      {"count", r.count},
                      {"triage", std::string(to_string(r.triage))},
                      {"first_event", event_json(r.first_event)},
                      {"lineage_ids", r.lineage_ids},
                      {"case_contexts", r.case_contexts}};
}

BugReport report_from(const nlohmann::json& j) {
  BugReport r;
  r.dedup_key = j.at("dedup_key").get<std::string>();
  r.pattern_id = j.at("pattern_id").get<std::string>();
  r.bug_class = j.at("bug_class").get<std::string>();
  r.count = j.at("count").get<std::uint64_t>();
  r.triage = parse_triage(j.at("triage").get<std::string>()).value_or(Triage::unreviewed);
  r.first_event = event_from(j.at("first_event"));
  r.lineage_ids = j.at("lineage_ids").get<std::vector<std::string>>();
  r.case_contexts = j.at("case_contexts").get<std::vector<std::string>>();
  return r;
}

BugReport read_report(const fs::path& file) {
  try {
    return report_from(nlohmann::json::parse(read_file(file.string())));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, file.string(), e.what());
  }
}

}  // namespace

void save_bug_reports(const std::string& root, const std::vector<BugReport>& reports,
                      const std::map<std::string, sql::SqlTestCase>& cases_by_context) {
  fs::create_directories(root);
  for (const auto& report : reports) {
    const fs::path dir = fs::path(root) / report.dedup_key;
    BugReport r = report;
    if (fs::exists(dir / "report.json") && r.triage == Triage::unreviewed) r.triage = read_report(dir / "report.json").triage;
    fs::create_directories(dir);
    write_file((dir / "report.json").string(), report_json(r).dump(2) + "\n");
    std::size_t n = 0;
    for (const auto& context : r.case_contexts) {
      const auto it = cases_by_context.find(context);
      if (it == cases_by_context.end()) continue;
      write_file((dir / ("case-" + std::to_string(++n) + ".sql")).string(), sql::render_corpus({it->second}));
    }
  }
}

std::vector<BugReport> load_bug_reports(const std::string& root) {
  std::vector<BugReport> out;
  if (!fs::is_directory(root)) return out;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory() && fs::exists(entry.path() / "report.json")) files.push_back(entry.path() / "report.json");
  std::sort(files.begin(), files.end());
  for (const auto& f : files) out.push_back(read_report(f));
  // First-seen order survives reloads through the event timestamp.
  std::stable_sort(out.begin(), out.end(), [](const BugReport& a, const BugReport& b) {
    return a.first_event.timestamp < b.first_event.timestamp;
  });
  return out;
}

BugReport triage_bug(const std::string& root, const std::string& id, Triage verdict) {
  if (id.empty()) throw NotFound("bug report ''");
  std::vector<fs::path> matches;
  if (fs::is_directory(root))
    for (const auto& entry : fs::directory_iterator(root)) {
      const std::string name = entry.path().filename().string();
      if (entry.is_directory() && name.compare(0, id.size(), id) == 0 && fs::exists(entry.path() / "report.json"))
        matches.push_back(entry.path());
    }
  if (matches.size() != 1)
    throw NotFound("bug report '" + id + "'" + (matches.empty() ? "" : " (ambiguous prefix)"));
  const fs::path file = matches.front() / "report.json";
  BugReport r = read_report(file);
  r.triage = verdict;
  write_file(file.string(), report_json(r).dump(2) + "\n");
  return r;
}

BugCounts count_bugs(const std::vector<BugReport>& reports) {
  BugCounts c;
  c.reported = reports.size();
  for (const auto& r : reports) {
    if (r.triage == Triage::real) ++c.real;
    if (r.triage == Triage::false_positive) ++c.false_positive;
  }
  return c;
}

}  // namespace dbfuzz::monitor
