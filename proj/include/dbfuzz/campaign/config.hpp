#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dbfuzz/connector/sequence.hpp"
#include "dbfuzz/connector/synthesis.hpp"
#include "dbfuzz/llm/provider_config.hpp"
#include "dbfuzz/mutation/fuzzer.hpp"
#include "dbfuzz/sql/types.hpp"
#include "dbfuzz/target/faults.hpp"

namespace dbfuzz::campaign {

struct TargetConfig {
  enum class Kind { mini_target, subprocess };
  Kind kind = Kind::mini_target;
  /// Program and arguments of a subprocess target.
  std::vector<std::string> argv;
  sql::Dialect dialect = sql::Dialect::minisql;
  target::FaultSet faults;
  std::chrono::microseconds hang_delay{200};

  /// Short label used to pair reports in comparisons.
  std::string label;
};

struct DriverConfig {
  std::size_t max_length = connector::kDefaultMaxLength;
  /// Enumerated sequences.
  std::size_t budget = 20;
  /// Synthesis prompts sent to the model.
  std::size_t llm_samples = 10;
  std::size_t repair_iterations = connector::kDefaultRepairIterations;
};

/// A campaign document (JSON). Relative paths resolve against the document's
/// directory.
///
///   {
///     "name": "treatment",
///     "target": {"kind": "mini_target", "dialect": "minisql", "faults": ["all"]},
///     "iterations": 1000,              // or "duration_seconds": 60, never both
///     "workers": 1,
///     "rng_seed": 7,
///     "llm": {"provider": "mock", "mock_script": "mock.json"},
///     "corpus": ["seeds/minisql_seeds.sql"],
///     "state_machine": "machines/jdbc.json",      // optional
///     "driver": {"max_length": 15, "budget": 20, "llm_samples": 10, "repair_iterations": 3},
///     "patterns": "patterns/handwritten.jsonl",
///     "extra_patterns": ["patterns/mined.jsonl"], // optional
///     "output_dir": "out/treatment",
///     "scheduling": "energy",
///     "mutation": {"max_ops": 4, "attempts": 8},
///     "energy": {"decay": 0.95, "reward": 1.0, "floor": 0.01, "initial": 1.0},
///     "retain_new_coverage": true
///   }
struct CampaignConfig {
  std::string name = "campaign";
  TargetConfig target;
  std::optional<std::uint64_t> iterations;
  std::optional<std::chrono::milliseconds> duration;
  std::size_t workers = 1;
  std::uint64_t rng_seed = 1;
  llm::ProviderConfig llm;
  std::vector<std::string> corpus;
  std::optional<std::string> state_machine;
  DriverConfig driver;
  std::string patterns;
  std::vector<std::string> extra_patterns;
  std::string output_dir;
  mutation::Scheduling scheduling = mutation::Scheduling::energy;
  mutation::MutationParams mutation;
  mutation::EnergyParams energy;
  bool retain_new_coverage = true;

  /// Field errors are ConfigError with a dotted path. Referenced files must
  /// exist.
  static CampaignConfig from_json(const nlohmann::json& doc, const std::string& base_dir = "");
  static CampaignConfig load(const std::string& path);

  bool zero_budget() const { return iterations && *iterations == 0; }
  mutation::FuzzConfig fuzz_config() const;
};

}  // namespace dbfuzz::campaign
