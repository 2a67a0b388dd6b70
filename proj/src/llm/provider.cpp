#include "dbfuzz/llm/provider.hpp"

#include <cctype>

#include "dbfuzz/common/error.hpp"

namespace dbfuzz::llm {

void PromptRequest::validate() const {
  if (user_text.empty()) throw PreconditionError("prompt request: user_text must be non-empty");
  if (!(temperature >= 0.0 && temperature <= 1.0))
    throw PreconditionError("prompt request: temperature must lie in [0,1]");
  if (max_output_tokens < 1) throw PreconditionError("prompt request: max_output_tokens must be >= 1");
}

std::string_view to_string(FinishReason reason) {
  switch (reason) {
    case FinishReason::complete: return "complete";
    case FinishReason::truncated: return "truncated";
    case FinishReason::refused: return "refused";
    case FinishReason::transport_error: return "transport_error";
  }
  return "unknown";
}

std::optional<FinishReason> parse_finish_reason(std::string_view text) {
  for (auto r : {FinishReason::complete, FinishReason::truncated, FinishReason::refused, FinishReason::transport_error})
    if (to_string(r) == text) return r;
  return std::nullopt;
}

Provider::Provider(std::size_t max_in_flight)
    : in_flight_(static_cast<std::ptrdiff_t>(
          std::min<std::size_t>(std::max<std::size_t>(max_in_flight, 1), kMaxInFlightLimit))) {}

PromptResponse Provider::complete(const PromptRequest& request) {
  request.validate();
  in_flight_.acquire();
  struct Release {
    std::counting_semaphore<kMaxInFlightLimit>& sem;
    ~Release() { sem.release(); }
  } release{in_flight_};

  const auto start = std::chrono::steady_clock::now();
  PromptResponse response = do_complete(request);
  response.latency =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  if (response.provider_id.empty()) response.provider_id = id();
  if (response.finish_reason == FinishReason::complete && response.text.empty())
    response.finish_reason = FinishReason::refused;
  return response;
}

std::size_t count_tokens(std::string_view text) {
  std::size_t count = 0;
  bool in_word = false;
  for (char c : text) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_word) ++count;
    in_word = !space;
  }
  return count;
}

std::string truncate_tokens(std::string_view text, std::size_t max_tokens) {
  std::size_t count = 0;
  bool in_word = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const bool space = std::isspace(static_cast<unsigned char>(text[i])) != 0;
    if (space && in_word && count == max_tokens) return std::string(text.substr(0, i));
    if (!space && !in_word) ++count;
    in_word = !space;
  }
  return std::string(text);
}

}  // namespace dbfuzz::llm
