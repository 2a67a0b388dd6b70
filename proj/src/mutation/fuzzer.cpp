#include "dbfuzz/mutation/fuzzer.hpp"

#include <cstdio>
#include <thread>

#include "dbfuzz/common/error.hpp"

namespace dbfuzz::mutation {

namespace {

std::string mutant_id(std::uint64_t iteration) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "m%07llu", static_cast<unsigned long long>(iteration));
  return buf;
}

std::string context_of(const CorpusEntry& e) { return e.test_case.lineage_id + "@" + e.id; }

}  // namespace

Fuzzer::Fuzzer(FuzzConfig config, ExecutorFactory factory) : config_(std::move(config)), factory_(std::move(factory)) {
  if (config_.workers == 0) throw ConfigError("workers", "must be at least 1");
  if (!factory_) throw PreconditionError("fuzzer needs an executor factory");
}

void Fuzzer::add_seed(sql::SqlTestCase test_case) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "s%05zu", corpus_.size());
  CorpusEntry e;
  e.id = buf;
  e.test_case = std::move(test_case);
  e.energy = config_.energy.initial;
  corpus_.push_back(std::move(e));
}

void Fuzzer::add_entry(CorpusEntry entry) {
  for (std::uint32_t id : entry.fingerprint) global_seen_.insert(id);
  corpus_.push_back(std::move(entry));
}

void Fuzzer::observe(const sql::SqlTestCase& c, const std::string& context, const sql::ExecutionResult& r) {
  stats_.statements += r.statements.size();
  stats_.accepted_statements += r.accepted_count();
  if (observer_) observer_(c, context, r);
}

void Fuzzer::execute_seeds(sql::Executor& executor) {
  for (auto& e : corpus_) {
    if (e.executed) continue;
    const std::string context = context_of(e);
    const sql::ExecutionResult r = executor.execute(e.test_case, context);
    e.fingerprint = r.fingerprint;
    e.executed = true;
    for (std::uint32_t id : r.fingerprint) global_seen_.insert(id);
    observe(e.test_case, context, r);
  }
}

void Fuzzer::run_worker(std::size_t worker, sql::Executor& executor) {
  Rng rng(mix_seed(config_.rng_seed, 0x5eed0000ULL + worker));
  const auto deadline = std::chrono::steady_clock::now() + config_.duration.value_or(std::chrono::milliseconds(0));
  for (;;) {
    if (config_.duration && std::chrono::steady_clock::now() >= deadline) break;
    const std::uint64_t step = next_iteration_.fetch_add(1);
    if (!config_.duration && step >= config_.iterations) break;
    const std::uint64_t iteration = config_.first_iteration + step;

    CorpusEntry parent;
    std::size_t index = 0;
    {
      std::lock_guard lock(mutex_);
      index = schedule_next(corpus_, rng, config_.scheduling);
      parent = corpus_[index];
    }
    const sql::SchemaContext& schema = parent.test_case.schema ? *parent.test_case.schema : schema_;
    CorpusEntry child;
    child.id = mutant_id(iteration);
    child.test_case = mutate(parent, mix_seed(config_.rng_seed, iteration), schema, config_.mutation);
    const std::string context = context_of(child);
    const sql::ExecutionResult result = executor.execute(child.test_case, context);

    std::lock_guard lock(mutex_);
    Feedback fb = update_feedback(std::move(corpus_[index]), result.fingerprint, global_seen_, config_.energy);
    corpus_[index] = std::move(fb.entry);
    global_seen_.insert(fb.newly_covered.begin(), fb.newly_covered.end());
    ++stats_.iterations;
    curve_.push_back(global_seen_.size());
    observe(child.test_case, context, result);
    if (config_.retain_new_coverage && !fb.newly_covered.empty()) {
      child.fingerprint = result.fingerprint;
      child.executed = true;
      child.energy = config_.energy.initial + config_.energy.reward * static_cast<double>(fb.newly_covered.size());
      corpus_.push_back(std::move(child));
    }
  }
}

FuzzStats Fuzzer::run() {
  if (corpus_.empty()) throw PreconditionError("fuzzing needs at least one seed");
  std::vector<std::unique_ptr<sql::Executor>> executors;
  for (std::size_t w = 0; w < config_.workers; ++w) executors.push_back(factory_(w));
  execute_seeds(*executors.front());
  next_iteration_ = 0;
  if (config_.workers == 1) {
    run_worker(0, *executors.front());
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < config_.workers; ++w) threads.emplace_back([this, w, &executors] { run_worker(w, *executors[w]); });
    for (auto& t : threads) t.join();
  }
  stats_.corpus_size = corpus_.size();
  stats_.branch_total = global_seen_.size();
  return stats_;
}

}  // namespace dbfuzz::mutation
