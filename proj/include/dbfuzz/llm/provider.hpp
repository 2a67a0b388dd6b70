#pragma once

#include <chrono>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>

namespace dbfuzz::llm {

struct PromptRequest {
  std::string system_text;
  std::string user_text;
  double temperature = 0.0;
  std::size_t max_output_tokens = 2048;
  std::string tag;

  /// Throws PreconditionError when the request breaks its invariants.
  void validate() const;
};

enum class FinishReason { complete, truncated, refused, transport_error };

std::string_view to_string(FinishReason reason);
std::optional<FinishReason> parse_finish_reason(std::string_view text);

struct PromptResponse {
  std::string text;
  FinishReason finish_reason = FinishReason::complete;
  std::string provider_id;
  std::chrono::milliseconds latency{0};

  bool ok() const { return finish_reason == FinishReason::complete; }
};

/// Chat-style completion endpoint. Callers see provider identity only through
/// PromptResponse::provider_id.
///
/// `complete` validates the request, enforces the in-flight cap and stamps
/// latency; subclasses implement `do_complete`. Refusals and transport failures
/// are reported through `finish_reason`, never thrown.
class Provider {
 public:
  static constexpr std::ptrdiff_t kMaxInFlightLimit = 256;

  explicit Provider(std::size_t max_in_flight = 4);
  virtual ~Provider() = default;
  Provider(const Provider&) = delete;
  Provider& operator=(const Provider&) = delete;

  PromptResponse complete(const PromptRequest& request);
  virtual std::string id() const = 0;

 protected:
  virtual PromptResponse do_complete(const PromptRequest& request) = 0;

 private:
  std::counting_semaphore<kMaxInFlightLimit> in_flight_;
};

/// Approximate token count used for truncation: whitespace-separated words.
std::size_t count_tokens(std::string_view text);
/// Keeps the first `max_tokens` words of `text` (original spacing preserved).
std::string truncate_tokens(std::string_view text, std::size_t max_tokens);

}  // namespace dbfuzz::llm
