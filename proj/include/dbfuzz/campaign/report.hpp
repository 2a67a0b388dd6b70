#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dbfuzz/common/ratio.hpp"
#include "dbfuzz/monitor/bug_store.hpp"

namespace dbfuzz::campaign {

/// Metrics of one campaign arm on one target. Absent phases leave their
/// fields empty. Contains nothing time-dependent, so equal runs render equal
/// documents.
struct CampaignReport {
  std::string name;
  std::string target;
  std::uint64_t rng_seed = 0;
  std::vector<std::string> phases;

  /// Model-written sequences that validated before repair, over prompts sent.
  std::optional<Ratio> driver_raw_ratio;
  /// Every emitted driver (repaired model output plus enumerated walks).
  std::optional<Ratio> driver_correctness_ratio;
  std::size_t drivers = 0;

  std::size_t seed_cases = 0;
  std::size_t transferred_cases = 0;
  /// Accepted over executed statements of the transferred corpus.
  std::optional<Ratio> semantic_correctness_ratio;

  std::uint64_t iterations = 0;
  std::uint64_t executed_statements = 0;
  std::uint64_t accepted_statements = 0;
  std::size_t corpus_size = 0;
  std::size_t branch_total = 0;

  std::uint64_t anomalies = 0;
  std::size_t reported_bugs = 0;
  std::size_t real_bugs = 0;
  std::size_t false_positive_bugs = 0;

  nlohmann::ordered_json to_json() const;
  static CampaignReport from_json(const nlohmann::json& doc);
  static CampaignReport load(const std::string& path);
  /// Human-readable summary.
  std::string render() const;

  /// Recounts bug totals from a bug directory, picking up triage verdicts.
  void refresh_bug_counts(const std::vector<monitor::BugReport>& reports);
  /// Throws PreconditionError when an invariant is broken (ratios outside
  /// [0,1], more real than reported bugs).
  void validate() const;
};

enum class Metric { driver_correctness_ratio, semantic_correctness_ratio, branch_total, reported_bugs, real_bugs };
std::string_view to_string(Metric metric);
/// Metric value, or nullopt when the phase did not run.
std::optional<double> metric_value(const CampaignReport& report, Metric metric);

struct MetricRow {
  Metric metric;
  std::string target;
  std::optional<double> baseline;
  std::optional<double> treatment;
  /// (treatment - baseline) / baseline; nullopt when undefined.
  std::optional<double> improvement;
};

/// Cross-target aggregate of one metric in both styles.
struct Aggregate {
  Metric metric;
  /// Improvement of the per-target means.
  std::optional<double> ratio_of_means;
  /// Mean of the per-target improvements.
  std::optional<double> mean_of_ratios;
};

struct ComparisonTable {
  std::string baseline_name;
  std::string treatment_name;
  std::vector<std::string> targets;
  std::vector<MetricRow> rows;
  std::vector<Aggregate> aggregates;

  const MetricRow& row(Metric metric, const std::string& target) const;
  const Aggregate& aggregate(Metric metric) const;
  nlohmann::ordered_json to_json() const;
  /// Tables: driver ratios with branches, semantic ratios with branches,
  /// reported and real bugs, then aggregates. Ratios print with 4 decimals,
  /// improvements with 2.
  std::string render() const;
};

/// Pairs reports by target (baseline order). Throws PreconditionError when
/// the two arms cover different targets or either arm is empty.
ComparisonTable compare_runs(const std::vector<CampaignReport>& baseline, const std::vector<CampaignReport>& treatment);
ComparisonTable compare_runs(const CampaignReport& baseline, const CampaignReport& treatment);

}  // namespace dbfuzz::campaign
