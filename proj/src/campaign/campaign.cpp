#include "dbfuzz/campaign/campaign.hpp"

#include <filesystem>
#include <mutex>
#include <set>

#include <json.hpp>

#include "dbfuzz/common/error.hpp"
#include "dbfuzz/common/text.hpp"
#include "dbfuzz/connector/driver_io.hpp"
#include "dbfuzz/connector/synthesis.hpp"
#include "dbfuzz/llm/mock_provider.hpp"
#include "dbfuzz/monitor/agent.hpp"
#include "dbfuzz/monitor/bug_store.hpp"
#include "dbfuzz/mutation/corpus_dir.hpp"
#include "dbfuzz/sql/corpus_io.hpp"
#include "dbfuzz/target/engine.hpp"
#include "dbfuzz/target/subprocess_executor.hpp"
#include "dbfuzz/transfer/transfer.hpp"

namespace dbfuzz::campaign {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kMaxFlaggedCases = 20000;
constexpr std::size_t kCasesPerBug = 5;
constexpr std::size_t kMaxWarningLog = 50000;

/// Owns a target handle and the agent listening to it. The subscription is
/// declared last so it detaches before the handle goes away.
class MonitoredExecutor final : public sql::Executor {
 public:
  MonitoredExecutor(std::unique_ptr<sql::Executor> inner, monitor::EventSink sink) : inner_(std::move(inner)) {
    subscription_ = monitor::attach_agent(*inner_, std::move(sink));
  }
  ~MonitoredExecutor() override {
    subscription_->flush();
    subscription_.reset();
  }

  std::string name() const override { return inner_->name(); }
  bool available() const override { return inner_->available(); }
  void reset() override { inner_->reset(); }
  sql::StatementResult execute_statement(std::string_view sql) override { return inner_->execute_statement(sql); }
  sql::SchemaContext catalog_dump() override { return inner_->catalog_dump(); }
  void set_case_context(std::string_view id) override { inner_->set_case_context(id); }

 private:
  std::unique_ptr<sql::Executor> inner_;
  std::unique_ptr<monitor::Subscription> subscription_;
};

std::vector<std::string> warning_lines(const sql::ExecutionResult& r) {
  std::vector<std::string> out;
  for (const auto& line : r.log_lines)
    if (monitor::parse_log_line(line).severity >= monitor::Severity::warn) out.push_back(line);
  return out;
}

std::vector<sql::SqlTestCase> load_seeds(const std::vector<std::string>& paths) {
  std::vector<sql::SqlTestCase> seeds;
  for (const auto& path : paths) {
    auto cases = sql::parse_corpus(read_file(path), fs::path(path).stem().string());
    for (auto& c : cases) seeds.push_back(std::move(c));
  }
  return seeds;
}

/// Old and new reports for the same key fold into one: counts add, ids
/// union, triage stays.
std::vector<monitor::BugReport> merge_reports(std::vector<monitor::BugReport> existing,
                                              const std::vector<monitor::BugReport>& fresh) {
  for (const auto& r : fresh) {
    auto it = std::find_if(existing.begin(), existing.end(),
                           [&](const monitor::BugReport& e) { return e.dedup_key == r.dedup_key; });
    if (it == existing.end()) {
      existing.push_back(r);
      continue;
    }
    it->count += r.count;
    for (const auto& id : r.lineage_ids)
      if (std::find(it->lineage_ids.begin(), it->lineage_ids.end(), id) == it->lineage_ids.end()) it->lineage_ids.push_back(id);
    for (const auto& id : r.case_contexts)
      if (it->case_contexts.size() < monitor::kMaxContextsPerReport &&
          std::find(it->case_contexts.begin(), it->case_contexts.end(), id) == it->case_contexts.end())
        it->case_contexts.push_back(id);
  }
  return existing;
}

void write_report(const std::string& output_dir, const CampaignReport& report) {
  write_file((fs::path(output_dir) / "report.json").string(), report.to_json().dump(2) + "\n");
  write_file((fs::path(output_dir) / "report.txt").string(), report.render());
}

}  // namespace

std::unique_ptr<sql::Executor> make_target_executor(const TargetConfig& target) {
  if (target.kind == TargetConfig::Kind::subprocess) return std::make_unique<target::SubprocessExecutor>(target.argv);
  target::EngineOptions options;
  options.dialect = target.dialect;
  options.faults = target.faults;
  options.hang_delay = target.hang_delay;
  return std::make_unique<target::MiniEngine>(options);
}

DriverPhase run_driver_phase(const connector::ApiStateMachine& machine, const DriverConfig& config, llm::Provider& llm) {
  DriverPhase out;
  std::set<connector::TransitionPair> covered;
  std::uint64_t raw_valid = 0;
  for (std::size_t i = 0; i < config.llm_samples; ++i) {
    const llm::PromptResponse resp = llm.complete(connector::build_synthesis_prompt(machine, config.max_length, covered));
    ++out.llm_calls;
    connector::ApiSequence candidate;
    if (resp.ok() || resp.finish_reason == llm::FinishReason::truncated)
      candidate = connector::parse_llm_sequence(resp.text, machine);
    candidate.source = connector::SequenceSource::llm;
    if (connector::validate_sequence(machine, candidate, config.max_length).valid) ++raw_valid;
    if (resp.finish_reason == llm::FinishReason::transport_error) continue;

    const connector::RepairOutcome repaired =
        connector::repair_loop(machine, candidate, llm, config.repair_iterations, config.max_length);
    out.llm_calls += repaired.llm_calls;
    // An empty answer never becomes a driver.
    if (repaired.sequence.calls.empty()) continue;
    const connector::ValidationReport report = connector::validate_sequence(machine, repaired.sequence, config.max_length);
    if (report.valid) {
      const auto pairs = connector::pairs_of(report.rule_path);
      covered.insert(pairs.begin(), pairs.end());
    }
    out.drivers.push_back(connector::annotate(machine, repaired.sequence, config.max_length));
  }
  if (config.llm_samples > 0) out.raw_ratio = Ratio{raw_valid, config.llm_samples};
  for (auto& s : connector::enumerate_sequences(machine, config.max_length, config.budget)) out.drivers.push_back(std::move(s));
  out.correctness_ratio = connector::driver_correctness_ratio(out.drivers, machine, config.max_length);
  return out;
}

TransferPhase run_transfer_phase(const std::vector<sql::SqlTestCase>& seeds, sql::Dialect target_dialect,
                                 llm::Provider& llm, sql::Executor& target) {
  TransferPhase out;
  const std::string target_label(sql::to_string(target_dialect));
  for (const auto& seed : seeds) {
    target::EngineOptions ref_options;
    ref_options.dialect = sql::parse_dialect(seed.dialect).value_or(sql::Dialect::minisql);
    target::MiniEngine reference(ref_options);
    const sql::SchemaContext schema = transfer::capture_schema(seed, reference);
    if (seed.dialect == target_label) {
      sql::SqlTestCase c = seed;
      c.schema = std::make_shared<const sql::SchemaContext>(schema);
      out.cases.push_back(std::move(c));
    } else {
      out.cases.push_back(transfer::transfer_seed(seed, schema, llm, target_label));
      ++out.transferred;
    }
  }
  if (!out.cases.empty()) out.semantic_correctness_ratio = transfer::semantic_correctness_ratio(out.cases, target);
  return out;
}

FuzzPhase run_fuzz_phase(const std::vector<mutation::CorpusEntry>& resumed, const std::vector<sql::SqlTestCase>& seeds,
                         const mutation::FuzzConfig& config, const TargetConfig& target,
                         const std::vector<monitor::ErrorPattern>& catalog) {
  FuzzPhase out;
  std::mutex anomalies_mutex;
  auto sink = [&](const monitor::LogEvent& event) {
    auto hits = monitor::match_patterns(event, catalog);
    if (hits.empty()) return;
    std::lock_guard lock(anomalies_mutex);
    for (auto& a : hits) out.anomalies.push_back(std::move(a));
  };

  mutation::Fuzzer fuzzer(config, [&](std::size_t) -> std::unique_ptr<sql::Executor> {
    return std::make_unique<MonitoredExecutor>(make_target_executor(target), sink);
  });
  if (!resumed.empty()) {
    for (const auto& e : resumed) fuzzer.add_entry(e);
  } else {
    for (const auto& s : seeds) fuzzer.add_seed(s);
  }
  fuzzer.set_observer([&](const sql::SqlTestCase& c, const std::string& context, const sql::ExecutionResult& r) {
    const auto lines = warning_lines(r);
    if (lines.empty()) return;
    if (out.flagged_cases.size() < kMaxFlaggedCases) out.flagged_cases.emplace(context, c);
    for (const auto& line : lines)
      if (out.warning_log.size() < kMaxWarningLog) out.warning_log.push_back(line);
  });
  out.stats = fuzzer.run();
  out.corpus = fuzzer.corpus();
  out.coverage_curve = fuzzer.coverage_curve();
  return out;
}

std::vector<monitor::ErrorPattern> load_catalogs(const CampaignConfig& config) {
  std::vector<monitor::ErrorPattern> catalog = monitor::load_catalog(config.patterns);
  std::set<std::string> ids;
  for (const auto& p : catalog) ids.insert(p.id);
  for (const auto& path : config.extra_patterns)
    for (auto& p : monitor::load_catalog(path)) {
      if (!ids.insert(p.id).second) throw ConfigError("extra_patterns", "pattern id '" + p.id + "' appears twice");
      catalog.push_back(std::move(p));
    }
  return catalog;
}

CampaignReport run_campaign(const CampaignConfig& config, const PhaseSelection& phases) {
  const fs::path out_dir(config.output_dir);
  fs::create_directories(out_dir);
  const std::string report_path = (out_dir / "report.json").string();

  CampaignReport report;
  if (!phases.all() && fs::exists(report_path)) report = CampaignReport::load(report_path);
  report.name = config.name;
  report.target = config.target.label;
  report.rng_seed = config.rng_seed;
  auto mark = [&](const std::string& phase) {
    if (std::find(report.phases.begin(), report.phases.end(), phase) == report.phases.end()) report.phases.push_back(phase);
  };

  if (config.zero_budget()) {
    write_report(config.output_dir, report);
    return report;
  }

  const std::unique_ptr<llm::Provider> llm = llm::make_provider(config.llm);

  if (phases.drivers && config.state_machine) {
    const connector::ApiStateMachine machine = connector::load_state_machine_file(*config.state_machine);
    const DriverPhase drivers = run_driver_phase(machine, config.driver, *llm);
    connector::write_drivers((out_dir / "drivers").string(), machine, drivers.drivers, config.driver.max_length);
    mark("drivers");
    report.drivers = drivers.drivers.size();
    report.driver_raw_ratio = drivers.raw_ratio;
    report.driver_correctness_ratio = drivers.correctness_ratio;
  } else if (phases.drivers && !phases.all()) {
    throw ConfigError("state_machine", "the driver phase needs a state machine");
  }

  const std::string transferred_path = (out_dir / "transferred.sql").string();
  std::vector<sql::SqlTestCase> cases;
  if (phases.transfer) {
    const std::vector<sql::SqlTestCase> seeds = load_seeds(config.corpus);
    if (seeds.empty()) throw ConfigError("corpus", "holds no test cases");
    TransferPhase transfer;
    {
      const auto target = make_target_executor(config.target);
      transfer = run_transfer_phase(seeds, config.target.dialect, *llm, *target);
    }
    transfer::write_transferred_corpus(transferred_path, transfer.cases);
    mark("transfer");
    report.seed_cases = seeds.size();
    report.transferred_cases = transfer.transferred;
    report.semantic_correctness_ratio = transfer.semantic_correctness_ratio;
    cases = std::move(transfer.cases);
  } else if (phases.fuzz) {
    cases = fs::exists(transferred_path) ? sql::load_corpus(transferred_path) : load_seeds(config.corpus);
  }

  if (phases.fuzz) {
    const std::vector<monitor::ErrorPattern> catalog = load_catalogs(config);
    const std::string corpus_dir = (out_dir / "corpus").string();
    const std::string state_path = (out_dir / "state.json").string();
    const std::vector<mutation::CorpusEntry> resumed = mutation::load_corpus_dir(corpus_dir);
    if (resumed.empty() && cases.empty()) throw ConfigError("corpus", "holds no test cases");
    mutation::FuzzConfig fuzz_config = config.fuzz_config();
    if (!resumed.empty() && fs::exists(state_path))
      fuzz_config.first_iteration = nlohmann::json::parse(read_file(state_path)).value("next_iteration", std::uint64_t{0});
    const FuzzPhase fuzz = run_fuzz_phase(resumed, cases, fuzz_config, config.target, catalog);
    mutation::save_corpus_dir(corpus_dir, fuzz.corpus);
    write_file(state_path,
               nlohmann::ordered_json{{"next_iteration", fuzz_config.first_iteration + fuzz.stats.iterations}}.dump(2) + "\n");
    write_file((out_dir / "target.log").string(), fuzz.warning_log.empty() ? "" : join(fuzz.warning_log, "\n") + "\n");
    mark("fuzz");
    report.iterations = fuzz.stats.iterations;
    report.executed_statements = fuzz.stats.statements;
    report.accepted_statements = fuzz.stats.accepted_statements;
    report.corpus_size = fuzz.stats.corpus_size;
    report.branch_total = fuzz.stats.branch_total;

    const std::string bugs_dir = (out_dir / "bugs").string();
    std::vector<monitor::BugReport> fresh = monitor::dedup_and_report(fuzz.anomalies);
    std::map<std::string, sql::SqlTestCase> repro;
    for (auto& r : fresh) {
      std::size_t kept = 0;
      for (const auto& ctx : r.case_contexts) {
        if (kept == kCasesPerBug) break;
        const auto it = fuzz.flagged_cases.find(ctx);
        if (it == fuzz.flagged_cases.end()) continue;
        repro.emplace(ctx, it->second);
        ++kept;
      }
    }
    const std::vector<monitor::BugReport> merged = merge_reports(monitor::load_bug_reports(bugs_dir), fresh);
    monitor::save_bug_reports(bugs_dir, merged, repro);
    mark("monitor");
    report.anomalies = fuzz.anomalies.size();
    report.refresh_bug_counts(monitor::load_bug_reports(bugs_dir));
  }

  report.validate();
  write_report(config.output_dir, report);
  return report;
}

CampaignReport refresh_report(const std::string& output_dir) {
  const fs::path dir(output_dir);
  CampaignReport report = CampaignReport::load((dir / "report.json").string());
  report.refresh_bug_counts(monitor::load_bug_reports((dir / "bugs").string()));
  report.validate();
  write_report(output_dir, report);
  return report;
}

}  // namespace dbfuzz::campaign
