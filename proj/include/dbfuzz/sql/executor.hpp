#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "dbfuzz/sql/types.hpp"
#include "dbfuzz/sql/value.hpp"

namespace dbfuzz::sql {

enum class Verdict { ok, ok_with_log, parse_error, semantic_error };

std::string_view to_string(Verdict verdict);
std::optional<Verdict> parse_verdict(std::string_view text);

struct StatementResult {
  Verdict verdict = Verdict::ok;
  std::string message;
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;
  std::vector<std::string> log_lines;
  std::vector<std::uint32_t> fingerprint;

  /// Executed without a parse or semantic error.
  bool accepted() const { return verdict == Verdict::ok || verdict == Verdict::ok_with_log; }
};

struct ExecutionResult {
  std::vector<StatementResult> statements;
  std::vector<std::uint32_t> fingerprint;  // sorted union over statements
  std::vector<std::string> log_lines;

  std::size_t accepted_count() const;
};

using LogListener = std::function<void(std::string_view line)>;

/// Handle to a SQL engine: the in-process mini target, a subprocess speaking
/// the line protocol, or an external adapter. Executors are stateful; callers
/// serialise access per handle.
class Executor {
 public:
  virtual ~Executor() = default;

  virtual std::string name() const = 0;
  virtual bool available() const { return true; }
  /// Drops all tables.
  virtual void reset() = 0;
  virtual StatementResult execute_statement(std::string_view sql) = 0;
  virtual SchemaContext catalog_dump() = 0;
  /// Lineage id stamped on log lines of subsequent statements.
  virtual void set_case_context(std::string_view lineage_id) { (void)lineage_id; }

  /// reset(), then every statement in order.
  ExecutionResult execute(const SqlTestCase& test_case);
  /// Same, with `context_id` stamped on log lines instead of the lineage id.
  ExecutionResult execute(const SqlTestCase& test_case, std::string_view context_id);

  /// Log channel. Listeners receive each emitted line in emission order.
  std::size_t add_log_listener(LogListener listener);
  void remove_log_listener(std::size_t handle);

 protected:
  void publish_log(std::string_view line);

 private:
  std::mutex listeners_mutex_;
  std::map<std::size_t, LogListener> listeners_;
  std::size_t next_listener_ = 1;
};

}  // namespace dbfuzz::sql
