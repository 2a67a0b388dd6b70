#pragma once

#include <atomic>
#include <string>
#include <vector>

#include <json.hpp>

#include "dbfuzz/llm/provider.hpp"

namespace dbfuzz::llm {

struct MockEntry {
  enum class Match { substring, hash };
  Match match = Match::substring;
  /// Substring of user_text, or content_hash(user_text) for Match::hash.
  std::string pattern;
  std::string response;
  FinishReason finish_reason = FinishReason::complete;

  bool matches(std::string_view user_text) const;
};

/// Ordered matcher list; first match wins, otherwise the fallback answers.
///
/// File schema (JSON):
///   { "entries": [ {"contains": "...", "response": "...", "finish_reason": "refused"},
///                  {"hash": "<16 hex digits>", "response": "..."} ],
///     "fallback": "..." }
/// An empty fallback answers with finish_reason=refused.
struct MockScript {
  std::vector<MockEntry> entries;
  std::string fallback;

  static MockScript from_json(const nlohmann::json& doc);
  static MockScript load(const std::string& path);
  nlohmann::json to_json() const;
};

class MockProvider final : public Provider {
 public:
  explicit MockProvider(MockScript script, std::size_t max_in_flight = 4);

  std::string id() const override { return "mock"; }
  std::size_t call_count() const { return calls_.load(); }
  const MockScript& script() const { return script_; }

 protected:
  PromptResponse do_complete(const PromptRequest& request) override;

 private:
  const MockScript script_;
  std::atomic<std::size_t> calls_{0};
};

}  // namespace dbfuzz::llm
