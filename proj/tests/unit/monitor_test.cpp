#include <gtest/gtest.h>

#include <fstream>
#include <regex>
#include <set>

#include "dbfuzz/common/text.hpp"
#include "dbfuzz/llm/mock_provider.hpp"
#include "dbfuzz/monitor/agent.hpp"
#include "dbfuzz/monitor/anomaly.hpp"
#include "dbfuzz/monitor/bug_store.hpp"
#include "dbfuzz/monitor/patterns.hpp"
#include "dbfuzz/target/engine.hpp"
#include "fault_triggers.hpp"
#include "test_support.hpp"

namespace dbfuzz::monitor {
namespace {

/// Executor whose log channel emits whatever the test pushes.
class EchoExecutor final : public sql::Executor {
 public:
  std::string name() const override { return "echo"; }
  bool available() const override { return up; }
  void reset() override {}
  sql::StatementResult execute_statement(std::string_view) override { return {}; }
  sql::SchemaContext catalog_dump() override { return {}; }
  void emit(std::string_view line) { publish_log(line); }
  bool up = true;
};

std::string line(std::uint64_t clock, std::string_view level, std::string_view message, std::string_view ctx = "") {
  char prefix[16];
  std::snprintf(prefix, sizeof(prefix), "%012llu", static_cast<unsigned long long>(clock));
  std::string out = std::string(prefix) + " " + std::string(level) + " [executor] ";
  if (!ctx.empty()) out += "{case=" + std::string(ctx) + "} ";
  return out + std::string(message);
}

LogEvent event(std::string message, Severity severity = Severity::error, std::string lineage = "c1") {
  LogEvent e;
  e.message = std::move(message);
  e.severity = severity;
  e.component = "executor";
  e.case_lineage = lineage;
  e.case_context = lineage + "@0";
  return e;
}

std::vector<ErrorPattern> handwritten() { return load_catalog(testing::data_path("patterns/handwritten.jsonl")); }

TEST(LogLine, ParsesEngineLayout) {
  const LogEvent e = parse_log_line(line(42, "ERROR", "Unhandled exception: x", "pg-1@17"));
  EXPECT_TRUE(e.parsed);
  EXPECT_EQ(e.timestamp, 42u);
  EXPECT_EQ(e.severity, Severity::error);
  EXPECT_EQ(e.component, "executor");
  EXPECT_EQ(e.case_lineage, "pg-1");
  EXPECT_EQ(e.case_context, "pg-1@17");
  EXPECT_EQ(e.message, "Unhandled exception: x");
  EXPECT_FALSE(parse_log_line(line(1, "INFO", "plain")).case_lineage.has_value());
}

TEST(LogLine, MalformedBecomesRawInfo) {
  const LogEvent e = parse_log_line("kernel: something odd");
  EXPECT_FALSE(e.parsed);
  EXPECT_EQ(e.severity, Severity::info);
  EXPECT_EQ(e.message, "kernel: something odd");
  EXPECT_FALSE(parse_log_line("").message.empty());
}

TEST(Agent, DeliversEngineLinesInOrder) {
  target::EngineOptions o;
  o.debug_logs = true;
  target::MiniEngine engine(o);
  std::vector<LogEvent> got;
  std::vector<std::string> emitted;
  engine.add_log_listener([&](std::string_view l) { emitted.emplace_back(l); });
  {
    auto sub = attach_agent(engine, [&](const LogEvent& e) { got.push_back(e); });
    engine.execute_statement("CREATE TABLE t(a INT)");
    engine.execute_statement("SELEC 1");
    engine.execute_statement("SELECT nope FROM t");
    sub->flush();
    EXPECT_EQ(sub->delivered(), emitted.size());
  }
  ASSERT_GE(got.size(), 3u);
  ASSERT_EQ(got.size(), emitted.size());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_EQ(got[i].message, parse_log_line(emitted[i]).message);
  for (std::size_t i = 1; i < got.size(); ++i) EXPECT_LT(got[i - 1].timestamp, got[i].timestamp);
}

TEST(Agent, ThreeLinesThreeEvents) {
  EchoExecutor echo;
  std::vector<LogEvent> got;
  auto sub = attach_agent(echo, [&](const LogEvent& e) { got.push_back(e); });
  echo.emit(line(1, "INFO", "one"));
  echo.emit("garbage line");
  echo.emit(line(3, "ERROR", "three"));
  sub->flush();
  ASSERT_EQ(got.size(), 3u);
  EXPECT_EQ(got[0].message, "one");
  EXPECT_FALSE(got[1].parsed);
  EXPECT_EQ(got[1].severity, Severity::info);
  EXPECT_EQ(got[2].severity, Severity::error);
}

TEST(Agent, ReplayCountMatchesLineCount) {
  EchoExecutor echo;
  std::uint64_t count = 0;
  std::uint64_t last = 0;
  bool ordered = true;
  auto sub = attach_agent(
      echo,
      [&](const LogEvent& e) {
        ordered = ordered && e.timestamp > last;
        last = e.timestamp;
        ++count;
      },
      64);
  for (std::uint64_t i = 1; i <= 100000; ++i) echo.emit(line(i, i % 7 ? "INFO" : "ERROR", "m" + std::to_string(i)));
  sub->flush();
  EXPECT_EQ(count, 100000u);
  EXPECT_TRUE(ordered);
}

TEST(Agent, FileTailCountsEveryLine) {
  testing::TempDir dir;
  const std::string path = dir.str("target.log");
  {
    std::ofstream out(path);
    for (int i = 1; i <= 100000; ++i) out << (i % 1000 == 0 ? std::string("raw noise") : line(i, "WARN", "w")) << "\n";
  }
  std::uint64_t count = 0, raw = 0;
  auto sub = attach_file_agent(path, [&](const LogEvent& e) {
    ++count;
    raw += !e.parsed;
  });
  sub->flush();
  EXPECT_EQ(count, 100000u);
  EXPECT_EQ(raw, 100u);
  {
    std::ofstream more(path, std::ios::app);
    more << line(100001, "ERROR", "late") << "\n";
  }
  sub->flush();
  EXPECT_EQ(count, 100001u);
}

TEST(Agent, UnavailableChannels) {
  EchoExecutor echo;
  echo.up = false;
  EXPECT_THROW(attach_agent(echo, [](const LogEvent&) {}), ChannelUnavailable);
  EXPECT_THROW(attach_file_agent("/nonexistent/dir/log", [](const LogEvent&) {}), ChannelUnavailable);
}

TEST(Catalog, BundledHandwrittenLoads) {
  const auto cat = handwritten();
  ASSERT_EQ(cat.size(), 4u);
  for (const auto& p : cat) EXPECT_EQ(p.provenance, Provenance::handwritten);
  const auto again = parse_catalog(render_catalog(cat));
  ASSERT_EQ(again.size(), cat.size());
  for (std::size_t i = 0; i < cat.size(); ++i) {
    EXPECT_EQ(again[i].id, cat[i].id);
    EXPECT_EQ(again[i].regex, cat[i].regex);
    EXPECT_EQ(again[i].min_severity, cat[i].min_severity);
  }
}

TEST(Catalog, RejectsBadRecords) {
  auto line_of = [](const std::string& text) {
    try {
      parse_catalog(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  EXPECT_EQ(line_of("{\"id\":\"a\",\"regex\":\"x\"}\n{\"id\":\"b\",\"regex\":\"(\"}\n"), 2u);
  EXPECT_EQ(line_of("# c\n\n{\"id\":\"a\",\"regex\":\"x\"}\n{\"id\":\"a\",\"regex\":\"y\"}\n"), 4u);
  EXPECT_EQ(line_of("{\"regex\":\"x\"}"), 1u);
  EXPECT_EQ(line_of("{\"id\":\"a\",\"regex\":\"x\",\"min_severity\":\"loud\"}"), 1u);
  EXPECT_EQ(line_of("not json"), 1u);
  EXPECT_THROW(make_pattern("p", "[", "c", Severity::error, Provenance::handwritten), ParseError);
}

TEST(Mining, ScriptedSinglePattern) {
  testing::QueueProvider llm({"`Unhandled exception: .*`"});
  const auto mined = mine_patterns({event("Unhandled exception: divide by zero")}, llm);
  ASSERT_EQ(mined.size(), 1u);
  EXPECT_EQ(mined[0].regex, "Unhandled exception: .*");
  EXPECT_EQ(mined[0].provenance, Provenance::llm_mined);
  EXPECT_EQ(mined[0].id.rfind("mined-", 0), 0u);
  ASSERT_NE(mined[0].compiled, nullptr);
}

TEST(Mining, InvalidRegexDropped) {
  testing::QueueProvider llm({"- `([unclosed`\n- `Internal error: .*`"});
  const auto mined = mine_patterns({event("Internal error: x")}, llm);
  ASSERT_EQ(mined.size(), 1u);
  EXPECT_EQ(mined[0].regex, "Internal error: .*");
}

TEST(Mining, PromptSamplesOnlyErrors) {
  std::vector<LogEvent> corpus{event("quiet", Severity::info), event("loud 12", Severity::error),
                               event("loud 13", Severity::error), event("boom", Severity::fatal)};
  const llm::PromptRequest r = build_mining_prompt(corpus);
  EXPECT_EQ(r.tag, "pattern-mine");
  EXPECT_EQ(r.user_text.find("quiet"), std::string::npos);
  EXPECT_NE(r.user_text.find("loud 12"), std::string::npos);
  EXPECT_EQ(r.user_text.find("loud 13"), std::string::npos);  // same shape as "loud 12"
  EXPECT_NE(r.user_text.find("boom"), std::string::npos);
  // Results never reach the model: only log text does.
  EXPECT_EQ(r.user_text.find("rows"), std::string::npos);
}

TEST(Mining, NothingToMine) {
  testing::QueueProvider llm({"`x`"});
  EXPECT_TRUE(mine_patterns({event("fine", Severity::info)}, llm).empty());
  EXPECT_TRUE(llm.requests().empty());
  EXPECT_THROW(mine_patterns({}, llm), PreconditionError);
  testing::QueueProvider refusing;
  EXPECT_TRUE(mine_patterns({event("bad")}, refusing).empty());
}

TEST(Mining, TriplesCarryClassAndSeverity) {
  const auto mined = parse_mined_patterns("`crash | fatal | Internal error: .*`\n`Assertion .* failed`\n`Assertion .* failed`");
  ASSERT_EQ(mined.size(), 2u);
  EXPECT_EQ(mined[0].bug_class, "crash");
  EXPECT_EQ(mined[0].min_severity, Severity::fatal);
  EXPECT_EQ(mined[1].bug_class, "llm-mined");
}

/// Error-level events from the engine with every fault enabled, one pass over
/// each trigger using `variant` to vary literal values.
std::vector<LogEvent> fault_log(int variant) {
  target::EngineOptions o;
  o.faults = target::FaultSet::all();
  o.hang_delay = std::chrono::microseconds(0);
  target::MiniEngine engine(o);
  std::vector<LogEvent> out;
  engine.add_log_listener([&](std::string_view l) { out.push_back(parse_log_line(l)); });
  for (const auto& spec : target::bundled_faults()) {
    engine.reset();
    for (const auto& s : testing::fault_fixture()) engine.execute_statement(s);
    std::string trigger = testing::fault_trigger(spec.fault);
    if (const auto at = trigger.find("-5"); variant && at != std::string::npos)
      trigger.replace(at, 2, "-" + std::to_string(5 + variant));
    engine.execute_statement(trigger);
  }
  return out;
}

bool is_fault_event(const LogEvent& e) {
  if (e.severity < Severity::error) return false;
  for (const auto& spec : target::bundled_faults())
    if (spec.effect == target::FaultEffect::logged_exception && e.message.rfind(spec.log_signature, 0) == 0) return true;
  return false;
}

std::size_t true_positives(const std::vector<LogEvent>& log, const std::vector<ErrorPattern>& catalog) {
  std::size_t tp = 0;
  for (const auto& e : log)
    if (is_fault_event(e) && !match_patterns(e, catalog).empty()) ++tp;
  return tp;
}

TEST(Mining, MinedCatalogKeepsUpWithHandwritten) {
  const auto training = fault_log(0);
  llm::MockProvider mock(llm::MockScript::load(testing::data_path("mock/treatment.json")));
  const auto mined = mine_patterns(training, mock);
  ASSERT_EQ(mined.size(), 3u);
  // Mining sees error and fatal lines only, so the comparison is over the
  // error-level fault events of a held-out run.
  const auto held_out = fault_log(7);
  std::set<std::string> fired;
  for (const auto& e : held_out)
    for (const auto& spec : target::bundled_faults())
      if (is_fault_event(e) && spec.effect == target::FaultEffect::logged_exception &&
          e.message.rfind(spec.log_signature, 0) == 0)
        fired.insert(spec.fault_id);
  EXPECT_EQ(fired.size(), 7u);
  const std::size_t faults = std::count_if(held_out.begin(), held_out.end(), is_fault_event);
  EXPECT_GE(true_positives(held_out, mined), true_positives(held_out, handwritten()));
  EXPECT_EQ(true_positives(held_out, mined), faults);
}

TEST(Match, SeverityFilterAndOrder) {
  const auto cat = handwritten();
  const auto hits = match_patterns(event("Unhandled exception: divide by zero in ArithmeticEvaluator"), cat);
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].pattern_id, "hw-unhandled-exception");
  EXPECT_TRUE(match_patterns(event("Unhandled exception: x", Severity::info), cat).empty());
  EXPECT_EQ(match_patterns(event("Query watchdog: slow", Severity::warn), cat).size(), 1u);

  std::vector<ErrorPattern> two{make_pattern("z", "boom", "c", Severity::error, Provenance::handwritten),
                                make_pattern("a", "bo+m", "c", Severity::error, Provenance::handwritten)};
  const auto both = match_patterns(event("boom"), two);
  ASSERT_EQ(both.size(), 2u);
  EXPECT_EQ(both[0].pattern_id, "a");
  EXPECT_EQ(both[1].pattern_id, "z");
}

TEST(Match, ReplayEqualsNaiveRescan) {
  const auto cat = handwritten();
  std::vector<std::string> lines;
  for (int v = 0; v < 30; ++v)
    for (const auto& e : fault_log(v)) {
      std::string l = line(lines.size() + 1, to_upper(std::string(to_string(e.severity))), e.message, "c@" + std::to_string(v));
      lines.push_back(l);
    }
  lines.push_back("unstructured Assertion x failed");
  EchoExecutor echo;
  std::vector<Anomaly> streamed;
  {
    auto sub = attach_agent(echo, [&](const LogEvent& e) {
      for (auto& a : match_patterns(e, cat)) streamed.push_back(std::move(a));
    });
    for (const auto& l : lines) echo.emit(l);
    sub->flush();
  }
  // Naive pass: fresh regexes, severity compared by rank.
  std::vector<std::pair<std::size_t, std::string>> expected;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const LogEvent e = parse_log_line(lines[i]);
    std::vector<std::string> ids;
    for (const auto& p : cat)
      if (static_cast<int>(e.severity) >= static_cast<int>(p.min_severity) && std::regex_search(e.message, std::regex(p.regex)))
        ids.push_back(p.id);
    std::sort(ids.begin(), ids.end());
    for (const auto& id : ids) expected.emplace_back(e.timestamp, id);
  }
  ASSERT_EQ(streamed.size(), expected.size());
  for (std::size_t i = 0; i < streamed.size(); ++i) {
    EXPECT_EQ(streamed[i].event.timestamp, expected[i].first);
    EXPECT_EQ(streamed[i].pattern_id, expected[i].second);
  }
  EXPECT_GT(streamed.size(), 100u);
}

TEST(Normalize, Rules) {
  EXPECT_EQ(normalize_message("overflow at 0x7f3a00000640 (len=25)"), "overflow at @ (len=#)");
  EXPECT_EQ(normalize_message("  state   12\tend "), "state # end");
  EXPECT_EQ(normalize_message("id deadbeef01 done"), "id @ done");
  EXPECT_EQ(normalize_message("word facade stays"), "word facade stays");
  EXPECT_EQ(dedup_key("p", "state 3"), dedup_key("p", "state 47"));
  EXPECT_NE(dedup_key("p", "state 3"), dedup_key("q", "state 3"));
  EXPECT_EQ(dedup_key("p", "x").size(), 16u);
}

std::vector<Anomaly> anomalies(const std::vector<std::pair<std::string, std::string>>& pid_msg) {
  std::vector<Anomaly> out;
  std::uint64_t clock = 0;
  for (const auto& [pid, msg] : pid_msg) {
    Anomaly a;
    a.pattern_id = pid;
    a.bug_class = "c";
    a.event = event(msg, Severity::error, "lin" + std::to_string(clock % 2));
    a.event.timestamp = ++clock;
    a.event.case_context = "lin@" + std::to_string(clock);
    a.dedup_key = dedup_key(pid, msg);
    out.push_back(a);
  }
  return out;
}

TEST(Dedup, FiveAnomaliesTwoKeys) {
  const auto in = anomalies({{"p", "state 1"}, {"q", "other"}, {"p", "state 2"}, {"q", "other"}, {"p", "state 33"}});
  const auto reports = dedup_and_report(in);
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_EQ(reports[0].count, 3u);
  EXPECT_EQ(reports[1].count, 2u);
  EXPECT_EQ(reports[0].first_event.timestamp, 1u);
  EXPECT_EQ(reports[0].lineage_ids, std::vector<std::string>{"lin0"});
  EXPECT_EQ(reports[1].lineage_ids, std::vector<std::string>{"lin1"});
  EXPECT_EQ(reports[0].case_contexts.size(), 3u);
  EXPECT_TRUE(dedup_and_report({}).empty());
}

TEST(Dedup, DoublingDoublesCounts) {
  auto x = anomalies({{"p", "a 1"}, {"q", "b"}, {"p", "a 9"}, {"r", "c 0x1f"}});
  const auto once = dedup_and_report(x);
  auto xx = x;
  xx.insert(xx.end(), x.begin(), x.end());
  const auto twice = dedup_and_report(xx);
  ASSERT_EQ(once.size(), twice.size());
  for (std::size_t i = 0; i < once.size(); ++i) {
    EXPECT_EQ(once[i].dedup_key, twice[i].dedup_key);
    EXPECT_EQ(twice[i].count, 2 * once[i].count);
  }
}

TEST(Dedup, ContextsAreCapped) {
  std::vector<std::pair<std::string, std::string>> many(100, {"p", "same"});
  const auto reports = dedup_and_report(anomalies(many));
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_EQ(reports[0].count, 100u);
  EXPECT_EQ(reports[0].case_contexts.size(), kMaxContextsPerReport);
}

TEST(BugStore, TriageRoundTrip) {
  testing::TempDir dir;
  const auto reports = dedup_and_report(anomalies({{"p", "a"}, {"q", "b"}, {"q", "b"}}));
  sql::SqlTestCase repro;
  repro.statements = {"SELECT 1"};
  repro.dialect = "minisql";
  repro.lineage_id = "lin0";
  save_bug_reports(dir.str(), reports, {{"lin@1", repro}});
  EXPECT_TRUE(std::filesystem::exists(dir.path() / reports[0].dedup_key / "case-1.sql"));

  auto loaded = load_bug_reports(dir.str());
  ASSERT_EQ(loaded.size(), 2u);
  EXPECT_EQ(count_bugs(loaded).reported, 2u);
  EXPECT_EQ(count_bugs(loaded).real, 0u);

  triage_bug(dir.str(), reports[0].dedup_key, Triage::false_positive);
  triage_bug(dir.str(), reports[0].dedup_key.substr(0, 6), Triage::real);
  loaded = load_bug_reports(dir.str());
  EXPECT_EQ(loaded[0].triage, Triage::real);
  const BugCounts c = count_bugs(loaded);
  EXPECT_EQ(c.real, 1u);
  EXPECT_EQ(c.false_positive, 0u);

  // Re-saving unreviewed reports keeps the verdict.
  save_bug_reports(dir.str(), reports, {});
  EXPECT_EQ(load_bug_reports(dir.str())[0].triage, Triage::real);
  EXPECT_THROW(triage_bug(dir.str(), "nope", Triage::real), NotFound);
  EXPECT_THROW(triage_bug(dir.str(), "", Triage::real), NotFound);
}

TEST(BugStore, EmptyRoot) {
  testing::TempDir dir;
  EXPECT_TRUE(load_bug_reports(dir.str("missing")).empty());
}

}  // namespace
}  // namespace dbfuzz::monitor
