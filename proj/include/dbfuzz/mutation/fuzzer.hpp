#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dbfuzz/mutation/scheduler.hpp"
#include "dbfuzz/sql/executor.hpp"

namespace dbfuzz::mutation {

struct FuzzConfig {
  std::uint64_t iterations = 1000;
  /// Wall-clock budget; when set it replaces the iteration budget and the
  /// run is no longer deterministic.
  std::optional<std::chrono::milliseconds> duration;
  /// Index of the first mutant; resumed runs continue past earlier ids.
  std::uint64_t first_iteration = 0;
  std::uint64_t rng_seed = 1;
  std::size_t workers = 1;
  Scheduling scheduling = Scheduling::energy;
  EnergyParams energy;
  MutationParams mutation;
  /// Keep mutants that reach new branch ids.
  bool retain_new_coverage = true;
};

struct FuzzStats {
  std::uint64_t iterations = 0;
  std::uint64_t statements = 0;
  std::uint64_t accepted_statements = 0;
  std::size_t corpus_size = 0;
  std::size_t branch_total = 0;
};

using ExecutorFactory = std::function<std::unique_ptr<sql::Executor>(std::size_t worker)>;
/// Called after each execution with the case, the context id stamped on its
/// log lines, and the result. Invoked under the corpus lock.
using ExecutionObserver =
    std::function<void(const sql::SqlTestCase&, const std::string& context_id, const sql::ExecutionResult&)>;

/// Coverage-guided mutation loop. Single-worker runs are a pure function of
/// (seeds, config, target behaviour); with several workers the corpus is
/// shared behind one lock and results depend on interleaving.
class Fuzzer {
 public:
  Fuzzer(FuzzConfig config, ExecutorFactory factory);

  void add_seed(sql::SqlTestCase test_case);
  /// Adds an entry as-is (resumed corpora keep fingerprint and energy).
  void add_entry(CorpusEntry entry);
  void set_observer(ExecutionObserver observer) { observer_ = std::move(observer); }
  /// Schema handed to schema-aware operators.
  void set_schema(sql::SchemaContext schema) { schema_ = std::move(schema); }

  FuzzStats run();

  const std::vector<CorpusEntry>& corpus() const { return corpus_; }
  const std::set<std::uint32_t>& global_seen() const { return global_seen_; }
  /// |global_seen| after each iteration.
  const std::vector<std::size_t>& coverage_curve() const { return curve_; }

 private:
  void run_worker(std::size_t worker, sql::Executor& executor);
  void execute_seeds(sql::Executor& executor);
  void observe(const sql::SqlTestCase& c, const std::string& context, const sql::ExecutionResult& r);

  FuzzConfig config_;
  ExecutorFactory factory_;
  ExecutionObserver observer_;
  sql::SchemaContext schema_;
  std::vector<CorpusEntry> corpus_;
  std::set<std::uint32_t> global_seen_;
  std::vector<std::size_t> curve_;
  FuzzStats stats_;
  std::mutex mutex_;
  std::atomic<std::uint64_t> next_iteration_{0};
};

}  // namespace dbfuzz::mutation
