#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <sstream>

#include "dbfuzz/campaign/campaign.hpp"
#include "dbfuzz/campaign/config.hpp"
#include "dbfuzz/campaign/report.hpp"
#include "dbfuzz/common/text.hpp"
#include "dbfuzz/monitor/anomaly.hpp"
#include "dbfuzz/monitor/bug_store.hpp"
#include "dbfuzz/monitor/log_event.hpp"
#include "dbfuzz/monitor/patterns.hpp"
#include "test_support.hpp"

namespace dbfuzz::campaign {
namespace {

namespace fs = std::filesystem;

nlohmann::json base_config(const std::string& output_dir, std::uint64_t iterations = 300) {
  nlohmann::json doc = nlohmann::json::parse(read_file(testing::data_path("configs/treatment.json")));
  doc["output_dir"] = output_dir;
  doc["iterations"] = iterations;
  return doc;
}

CampaignConfig config_of(const nlohmann::json& doc) { return CampaignConfig::from_json(doc, testing::data_path("configs")); }

std::string field_of(const nlohmann::json& doc) {
  try {
    config_of(doc);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<accepted>";
}

TEST(Config, BundledConfigsLoad) {
  for (const char* name : {"treatment.json", "offline.json", "subprocess.json"}) {
    const CampaignConfig c = CampaignConfig::load(testing::data_path(std::string("configs/") + name));
    EXPECT_EQ(c.workers, 1u) << name;
    EXPECT_TRUE(c.iterations.has_value()) << name;
  }
}

TEST(Config, ValidationNamesTheField) {
  testing::TempDir dir;
  nlohmann::json doc = base_config(dir.str());
  doc.erase("patterns");
  EXPECT_EQ(field_of(doc), "patterns");

  doc = base_config(dir.str());
  doc["patterns"] = "missing.jsonl";
  EXPECT_EQ(field_of(doc), "patterns");

  doc = base_config(dir.str());
  doc["duration_seconds"] = 5;
  EXPECT_EQ(field_of(doc), "iterations");

  doc = base_config(dir.str());
  doc.erase("iterations");
  EXPECT_EQ(field_of(doc), "iterations");

  doc = base_config(dir.str());
  doc["workers"] = 0;
  EXPECT_EQ(field_of(doc), "workers");

  doc = base_config(dir.str());
  doc["llm"]["mock_script"] = "nowhere.json";
  EXPECT_EQ(field_of(doc), "llm.mock_script");

  doc = base_config(dir.str());
  doc["target"]["faults"] = {"F99"};
  EXPECT_EQ(field_of(doc), "target.faults");

  doc = base_config(dir.str());
  doc["scheduling"] = "random";
  EXPECT_EQ(field_of(doc), "scheduling");

  doc = base_config(dir.str());
  doc["corpus"] = {"nothing.sql"};
  EXPECT_EQ(field_of(doc), "corpus[0]");

  EXPECT_EQ(field_of(base_config(dir.str())), "<accepted>");
}

TEST(Config, DurationBudget) {
  testing::TempDir dir;
  nlohmann::json doc = base_config(dir.str());
  doc.erase("iterations");
  doc["duration_seconds"] = 2;
  const CampaignConfig c = config_of(doc);
  EXPECT_FALSE(c.iterations.has_value());
  ASSERT_TRUE(c.fuzz_config().duration.has_value());
  EXPECT_EQ(*c.fuzz_config().duration, std::chrono::milliseconds(2000));
}

CampaignReport arm(const std::string& name, const std::string& target, std::optional<Ratio> driver,
                   std::optional<Ratio> semantic, std::size_t branches, std::size_t reported = 0, std::size_t real = 0) {
  CampaignReport r;
  r.name = name;
  r.target = target;
  r.driver_correctness_ratio = driver;
  r.semantic_correctness_ratio = semantic;
  r.branch_total = branches;
  r.reported_bugs = reported;
  r.real_bugs = real;
  return r;
}

TEST(Compare, SemanticTableArithmetic) {
  const std::vector<CampaignReport> llm = {arm("llm", "MonetDB", {}, Ratio{1594, 10000}, 26828),
                                           arm("llm", "DuckDB", {}, Ratio{2551, 10000}, 57937),
                                           arm("llm", "ClickHouse", {}, Ratio{1458, 10000}, 124887)};
  const std::vector<CampaignReport> ours = {arm("wf", "MonetDB", {}, Ratio{4134, 10000}, 41840),
                                            arm("wf", "DuckDB", {}, Ratio{3486, 10000}, 70583),
                                            arm("wf", "ClickHouse", {}, Ratio{3093, 10000}, 145383)};
  const ComparisonTable t = compare_runs(llm, ours);
  const std::vector<std::tuple<std::string, std::string, std::string>> expected = {
      {"MonetDB", "+159.35%", "+55.96%"}, {"DuckDB", "+36.65%", "+21.83%"}, {"ClickHouse", "+112.14%", "+16.41%"}};
  for (const auto& [target, ratio, branches] : expected) {
    EXPECT_EQ(format_improvement(t.row(Metric::semantic_correctness_ratio, target).improvement), ratio) << target;
    EXPECT_EQ(format_improvement(t.row(Metric::branch_total, target).improvement), branches) << target;
  }
  const std::string text = t.render();
  EXPECT_NE(text.find("0.1594"), std::string::npos);
  EXPECT_NE(text.find("145383"), std::string::npos);
  EXPECT_NE(text.find("+112.14%"), std::string::npos);
  EXPECT_EQ(text.find("Driver correctness"), std::string::npos);
}

TEST(Compare, DriverTableAggregates) {
  const std::vector<CampaignReport> llm = {arm("llm", "MariaDB", Ratio{142, 1000}, {}, 583),
                                           arm("llm", "MySQL", Ratio{216, 1000}, {}, 1256),
                                           arm("llm", "AWS", Ratio{203, 1000}, {}, 1382)};
  const std::vector<CampaignReport> ours = {arm("wf", "MariaDB", Ratio{331, 1000}, {}, 843),
                                            arm("wf", "MySQL", Ratio{367, 1000}, {}, 1982),
                                            arm("wf", "AWS", Ratio{394, 1000}, {}, 2293)};
  const ComparisonTable t = compare_runs(llm, ours);
  EXPECT_EQ(format_improvement(t.row(Metric::driver_correctness_ratio, "MariaDB").improvement), "+133.10%");
  const Aggregate& ratio = t.aggregate(Metric::driver_correctness_ratio);
  const Aggregate& branches = t.aggregate(Metric::branch_total);
  // Independent recomputation of both aggregation styles.
  const double rom = ((0.331 + 0.367 + 0.394) / 3) / ((0.142 + 0.216 + 0.203) / 3) - 1;
  const double mor = ((0.331 / 0.142 - 1) + (0.367 / 0.216 - 1) + (0.394 / 0.203 - 1)) / 3;
  const double branch_mor = ((843.0 / 583 - 1) + (1982.0 / 1256 - 1) + (2293.0 / 1382 - 1)) / 3;
  EXPECT_NEAR(*ratio.ratio_of_means, rom, 1e-12);
  EXPECT_NEAR(*ratio.mean_of_ratios, mor, 1e-12);
  EXPECT_NEAR(*branches.mean_of_ratios, branch_mor, 1e-12);
  EXPECT_EQ(format_improvement(ratio.ratio_of_means), "+94.65%");
  EXPECT_EQ(std::floor(*ratio.ratio_of_means * 1000) / 10, 94.6);
  EXPECT_EQ(format_improvement(branches.mean_of_ratios, 1), "+56.1%");
  const std::string text = t.render();
  EXPECT_NE(text.find("Ratio of means"), std::string::npos);
  EXPECT_NE(text.find("Mean of ratios"), std::string::npos);
}

TEST(Compare, IdenticalReportsShowNoChange) {
  const CampaignReport r = arm("a", "mini", Ratio{3, 4}, Ratio{1, 2}, 100, 5, 2);
  const ComparisonTable t = compare_runs(r, r);
  for (const auto& row : t.rows) EXPECT_EQ(format_improvement(row.improvement), "+0.00%") << to_string(row.metric);
}

TEST(Compare, ZeroBaselineIsUndefined) {
  const ComparisonTable t = compare_runs(arm("a", "mini", {}, {}, 100, 0, 0), arm("b", "mini", {}, {}, 120, 3, 1));
  EXPECT_EQ(format_improvement(t.row(Metric::reported_bugs, "mini").improvement), "undefined");
  EXPECT_FALSE(t.aggregate(Metric::real_bugs).mean_of_ratios.has_value());
  EXPECT_NE(t.render().find("undefined"), std::string::npos);
}

TEST(Compare, MismatchedTargetsThrow) {
  EXPECT_THROW(compare_runs(arm("a", "x", {}, {}, 1), arm("b", "y", {}, {}, 1)), PreconditionError);
  EXPECT_THROW(compare_runs(std::vector<CampaignReport>{}, {}), PreconditionError);
}

TEST(Report, JsonRoundTripAndValidation) {
  CampaignReport r = arm("a", "mini", Ratio{3, 4}, Ratio{1, 2}, 100, 5, 2);
  r.phases = {"drivers", "fuzz"};
  const CampaignReport back = CampaignReport::from_json(nlohmann::json::parse(r.to_json().dump()));
  EXPECT_EQ(back.to_json().dump(), r.to_json().dump());
  r.real_bugs = 6;
  EXPECT_THROW(r.validate(), PreconditionError);
  r.real_bugs = 1;
  r.semantic_correctness_ratio = Ratio{5, 4};
  EXPECT_THROW(r.validate(), PreconditionError);
}

/// A bug directory holding `reported` keys of which the first `real` are
/// triaged real and the rest false positive.
void seed_bug_dir(const std::string& dir, std::size_t reported, std::size_t real) {
  std::vector<monitor::Anomaly> anomalies;
  for (std::size_t i = 0; i < reported; ++i) {
    monitor::Anomaly a;
    a.pattern_id = "p" + std::to_string(i);
    a.bug_class = "c";
    a.event.message = "failure kind " + std::string(1, static_cast<char>('a' + i % 26)) + std::to_string(i);
    a.event.severity = monitor::Severity::error;
    a.event.timestamp = i + 1;
    a.dedup_key = monitor::dedup_key(a.pattern_id, a.event.message);
    anomalies.push_back(a);
  }
  const auto reports = monitor::dedup_and_report(anomalies);
  monitor::save_bug_reports(dir + "/bugs", reports, {});
  for (std::size_t i = 0; i < reports.size(); ++i)
    monitor::triage_bug(dir + "/bugs", reports[i].dedup_key, i < real ? monitor::Triage::real : monitor::Triage::false_positive);
}

TEST(Triage, ReportRendersFourteenNine) {
  testing::TempDir dir;
  CampaignReport r = arm("treatment", "mini", {}, {}, 10);
  write_file(dir.str("report.json"), r.to_json().dump(2));
  seed_bug_dir(dir.str(), 14, 9);
  const CampaignReport refreshed = refresh_report(dir.str());
  EXPECT_EQ(refreshed.reported_bugs, 14u);
  EXPECT_EQ(refreshed.real_bugs, 9u);
  EXPECT_EQ(refreshed.false_positive_bugs, 5u);
  const ComparisonTable t = compare_runs(arm("baseline", "mini", {}, {}, 10, 61, 0), refreshed);
  const std::string text = t.render();
  std::vector<std::string> cells;
  const std::size_t at = text.find("\nmini ", text.find("Reported and real bugs"));
  ASSERT_NE(at, std::string::npos) << text;
  std::istringstream line(text.substr(at + 1, text.find('\n', at + 1) - at - 1));
  for (std::string c; std::getline(line, c, '|');) cells.push_back(std::string(trim(c)));
  EXPECT_EQ(cells, (std::vector<std::string>{"mini", "61", "0", "14", "9"}));
}

TEST(Campaign, ZeroBudgetWritesEmptyReport) {
  testing::TempDir dir;
  const CampaignReport r = run_campaign(config_of(base_config(dir.str(), 0)));
  EXPECT_TRUE(r.phases.empty());
  EXPECT_EQ(r.branch_total, 0u);
  EXPECT_FALSE(r.semantic_correctness_ratio.has_value());
  EXPECT_NO_THROW(r.validate());
  EXPECT_TRUE(fs::exists(dir.path() / "report.json"));
}

TEST(Campaign, FullRunPopulatesEveryPhase) {
  testing::TempDir dir;
  const CampaignReport r = run_campaign(config_of(base_config(dir.str(), 1000)));
  EXPECT_EQ(r.phases, (std::vector<std::string>{"drivers", "transfer", "fuzz", "monitor"}));
  ASSERT_TRUE(r.driver_raw_ratio && r.driver_correctness_ratio && r.semantic_correctness_ratio);
  EXPECT_EQ(r.driver_correctness_ratio->value(), 1.0);
  EXPECT_GT(r.semantic_correctness_ratio->value(), 0.5);
  EXPECT_EQ(r.iterations, 1000u);
  EXPECT_GT(r.branch_total, 100u);
  EXPECT_GT(r.reported_bugs, 0u);
  EXPECT_EQ(r.real_bugs, 0u);
  for (const char* f : {"report.json", "report.txt", "transferred.sql", "state.json", "target.log", "drivers/manifest.json"})
    EXPECT_TRUE(fs::exists(dir.path() / f)) << f;
  EXPECT_NO_THROW(r.validate());
}

std::string tree_digest(const fs::path& root, const std::string& sub) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(root / sub))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& f : files) all += fs::relative(f, root).string() + "\n" + read_file(f.string());
  return all;
}

TEST(Campaign, SingleWorkerRunsAreByteIdentical) {
  testing::TempDir a, b;
  run_campaign(config_of(base_config(a.str(), 1000)));
  run_campaign(config_of(base_config(b.str(), 1000)));
  EXPECT_EQ(read_file(a.str("report.json")), read_file(b.str("report.json")));
  EXPECT_EQ(read_file(a.str("report.txt")), read_file(b.str("report.txt")));
  EXPECT_EQ(tree_digest(a.path(), "corpus"), tree_digest(b.path(), "corpus"));
  EXPECT_EQ(tree_digest(a.path(), "bugs"), tree_digest(b.path(), "bugs"));
}

TEST(Campaign, ReportedBugsEqualDistinctKeysInLog) {
  testing::TempDir dir;
  const CampaignConfig cfg = config_of(base_config(dir.str(), 1500));
  const CampaignReport r = run_campaign(cfg);
  // Independent pass over the persisted warning log.
  const auto catalog = load_catalogs(cfg);
  std::set<std::string> keys;
  for (const auto& line : split_lines(read_file(dir.str("target.log")))) {
    if (line.empty()) continue;
    const monitor::LogEvent e = monitor::parse_log_line(line);
    for (const auto& p : catalog)
      if (p.matches(e)) keys.insert(monitor::dedup_key(p.id, e.message));
  }
  EXPECT_EQ(r.reported_bugs, keys.size());
  EXPECT_EQ(monitor::load_bug_reports(dir.str("bugs")).size(), keys.size());
}

TEST(Campaign, FuzzPhaseResumes) {
  testing::TempDir dir;
  const CampaignConfig cfg = config_of(base_config(dir.str(), 300));
  const CampaignReport first = run_campaign(cfg);
  PhaseSelection fuzz_only;
  fuzz_only.drivers = false;
  fuzz_only.transfer = false;
  const CampaignReport second = run_campaign(cfg, fuzz_only);
  const auto state = nlohmann::json::parse(read_file(dir.str("state.json")));
  EXPECT_EQ(state["next_iteration"].get<std::uint64_t>(), 600u);
  EXPECT_GE(second.corpus_size, first.corpus_size);
  EXPECT_GE(second.branch_total, first.branch_total);
  EXPECT_TRUE(second.semantic_correctness_ratio.has_value());  // kept from the first run
  EXPECT_GE(second.reported_bugs, first.reported_bugs);
}

TEST(Campaign, EmptyMockStillCompletes) {
  testing::TempDir dir;
  nlohmann::json doc = base_config(dir.str(), 500);
  doc["llm"]["mock_script"] = "../mock/empty.json";
  const CampaignReport r = run_campaign(config_of(doc));
  EXPECT_EQ(r.phases.size(), 4u);
  EXPECT_EQ(r.driver_raw_ratio->numerator, 0u);
  EXPECT_EQ(r.driver_correctness_ratio->value(), 1.0);
  EXPECT_TRUE(r.semantic_correctness_ratio.has_value());
  EXPECT_GT(r.branch_total, 0u);
  EXPECT_NO_THROW(r.validate());
}

TEST(Campaign, SubprocessTarget) {
  testing::TempDir dir;
  nlohmann::json doc = base_config(dir.str(), 200);
  doc["target"] = {{"kind", "subprocess"},
                   {"argv", {DBFUZZ_SERVER_PATH, "--faults", "all", "--hang-delay-us", "0"}},
                   {"dialect", "minisql"},
                   {"label", "minisql-subprocess"}};
  const CampaignReport r = run_campaign(config_of(doc));
  EXPECT_EQ(r.target, "minisql-subprocess");
  EXPECT_GT(r.branch_total, 0u);
}

int cli(const std::string& args) {
  const int status = std::system((std::string(DBFUZZ_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, Smoke) {
  testing::TempDir dir;
  const std::string cfg = testing::data_path("configs/treatment.json");
  const std::string out = dir.str("run");
  EXPECT_EQ(cli("run -c " + cfg + " -o " + out + " --iterations 200"), 0);
  EXPECT_TRUE(fs::exists(out + "/report.json"));
  EXPECT_EQ(cli("report -d " + out + " --json"), 0);
  EXPECT_EQ(cli("triage -d " + out + " --id nosuchbug --verdict real"), 3);
  const std::string key = monitor::load_bug_reports(out + "/bugs").at(0).dedup_key;
  EXPECT_EQ(cli("triage -d " + out + " --id " + key + " --verdict real"), 0);
  EXPECT_EQ(CampaignReport::load(out + "/report.json").real_bugs, 1u);
  EXPECT_EQ(cli("compare --baseline " + out + "/report.json --treatment " + out + "/report.json -o " + dir.str("cmp.txt")), 0);
  EXPECT_NE(read_file(dir.str("cmp.txt")).find("+0.00%"), std::string::npos);

  nlohmann::json bad = base_config(out);
  bad.erase("patterns");
  write_file(dir.str("bad.json"), bad.dump());
  // Relative paths resolve against the config's directory, so point at data.
  EXPECT_EQ(cli("run -c " + dir.str("bad.json")), 2);
  EXPECT_EQ(cli("mine-patterns --logs " + out + "/target.log -o " + dir.str("mined.jsonl") + " --mock-script " +
                testing::data_path("mock/treatment.json")),
            0);
  EXPECT_EQ(monitor::load_catalog(dir.str("mined.jsonl")).size(), 3u);
  EXPECT_NE(cli("no-such-command"), 0);
}

}  // namespace
}  // namespace dbfuzz::campaign
