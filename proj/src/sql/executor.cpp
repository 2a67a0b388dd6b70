#include "dbfuzz/sql/executor.hpp"

#include <algorithm>
#include <iterator>

namespace dbfuzz::sql {

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::ok: return "ok";
    case Verdict::ok_with_log: return "ok_with_log";
    case Verdict::parse_error: return "parse_error";
    case Verdict::semantic_error: return "semantic_error";
  }
  return "ok";
}

std::optional<Verdict> parse_verdict(std::string_view text) {
  for (auto v : {Verdict::ok, Verdict::ok_with_log, Verdict::parse_error, Verdict::semantic_error})
    if (to_string(v) == text) return v;
  return std::nullopt;
}

std::size_t ExecutionResult::accepted_count() const {
  return static_cast<std::size_t>(
      std::count_if(statements.begin(), statements.end(), [](const StatementResult& s) { return s.accepted(); }));
}

ExecutionResult Executor::execute(const SqlTestCase& test_case) { return execute(test_case, test_case.lineage_id); }

ExecutionResult Executor::execute(const SqlTestCase& test_case, std::string_view context_id) {
  ExecutionResult result;
  reset();
  set_case_context(context_id);
  for (const auto& statement : test_case.statements) {
    StatementResult r = execute_statement(statement);
    std::vector<std::uint32_t> merged;
    merged.reserve(result.fingerprint.size() + r.fingerprint.size());
    std::set_union(result.fingerprint.begin(), result.fingerprint.end(), r.fingerprint.begin(), r.fingerprint.end(),
                   std::back_inserter(merged));
    result.fingerprint.swap(merged);
    result.log_lines.insert(result.log_lines.end(), r.log_lines.begin(), r.log_lines.end());
    result.statements.push_back(std::move(r));
  }
  set_case_context("");
  return result;
}

std::size_t Executor::add_log_listener(LogListener listener) {
  std::lock_guard lock(listeners_mutex_);
  const std::size_t handle = next_listener_++;
  listeners_.emplace(handle, std::move(listener));
  return handle;
}

void Executor::remove_log_listener(std::size_t handle) {
  std::lock_guard lock(listeners_mutex_);
  listeners_.erase(handle);
}

void Executor::publish_log(std::string_view line) {
  std::lock_guard lock(listeners_mutex_);
  for (auto& [handle, listener] : listeners_) listener(line);
}

}  // namespace dbfuzz::sql
