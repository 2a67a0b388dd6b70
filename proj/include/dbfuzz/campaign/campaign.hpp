#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dbfuzz/campaign/config.hpp"
#include "dbfuzz/campaign/report.hpp"
#include "dbfuzz/connector/state_machine.hpp"
#include "dbfuzz/monitor/anomaly.hpp"
#include "dbfuzz/mutation/fuzzer.hpp"

namespace dbfuzz::campaign {

/// Fresh handle to the configured target. Throws ExecutorUnavailable when a
/// subprocess target cannot be started.
std::unique_ptr<sql::Executor> make_target_executor(const TargetConfig& target);

struct DriverPhase {
  std::vector<connector::ApiSequence> drivers;
  /// Valid model answers before repair over prompts sent; empty when no
  /// prompt was sent.
  std::optional<Ratio> raw_ratio;
  Ratio correctness_ratio;
  std::size_t llm_calls = 0;
};

/// Model synthesis with repair, then enumerated walks to fill coverage.
DriverPhase run_driver_phase(const connector::ApiStateMachine& machine, const DriverConfig& config, llm::Provider& llm);

struct TransferPhase {
  std::vector<sql::SqlTestCase> cases;
  std::size_t transferred = 0;
  std::optional<Ratio> semantic_correctness_ratio;
};

/// Seeds written for another dialect are rewritten by the model; seeds already
/// in the target dialect pass through. Every case leaves with its captured
/// schema attached.
TransferPhase run_transfer_phase(const std::vector<sql::SqlTestCase>& seeds, sql::Dialect target_dialect,
                                 llm::Provider& llm, sql::Executor& target);

struct FuzzPhase {
  mutation::FuzzStats stats;
  std::vector<mutation::CorpusEntry> corpus;
  std::vector<monitor::Anomaly> anomalies;
  /// Cases whose execution logged at warning level or above, by context id.
  std::map<std::string, sql::SqlTestCase> flagged_cases;
  std::vector<std::size_t> coverage_curve;
  /// Target log lines at warning level or above, for offline pattern mining.
  std::vector<std::string> warning_log;
};

/// Fuzz loop with one monitor agent per worker executor. `resumed` entries
/// replace `seeds` when non-empty.
FuzzPhase run_fuzz_phase(const std::vector<mutation::CorpusEntry>& resumed, const std::vector<sql::SqlTestCase>& seeds,
                         const mutation::FuzzConfig& config, const TargetConfig& target,
                         const std::vector<monitor::ErrorPattern>& catalog);

/// Loads the configured catalog plus any extra catalogs. Ids must stay unique.
std::vector<monitor::ErrorPattern> load_catalogs(const CampaignConfig& config);

struct PhaseSelection {
  bool drivers = true;
  bool transfer = true;
  bool fuzz = true;

  bool all() const { return drivers && transfer && fuzz; }
};

/// Drivers, transfer, fuzz with the monitor, bug bookkeeping. Persists
/// `drivers/`, `transferred.sql`, `corpus/`, `bugs/`, `target.log`,
/// `report.json`, `report.txt` and `state.json` under output_dir. An
/// existing corpus directory resumes the campaign. A zero iteration budget
/// runs nothing and writes an empty report.
///
/// With a partial selection the existing report is updated in place and a
/// fuzz-only run seeds from `transferred.sql` when an earlier transfer left
/// one behind. The driver phase needs a configured state machine.
CampaignReport run_campaign(const CampaignConfig& config, const PhaseSelection& phases = {});

/// Reloads `report.json`, recounts bugs from `bugs/` (picking up triage) and
/// rewrites both report files.
CampaignReport refresh_report(const std::string& output_dir);

}  // namespace dbfuzz::campaign
