#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "dbfuzz/llm/http_provider.hpp"

#include <thread>

#include <json.hpp>

#include "dbfuzz/common/error.hpp"

namespace dbfuzz::llm {

namespace {

// Splits "https://host:port/path" into ("https://host:port", "/path").
std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("llm.endpoint", "expected an absolute URL, got '" + url + "'");
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

FinishReason map_finish_reason(const std::string& reason) {
  if (reason == "length") return FinishReason::truncated;
  if (reason == "content_filter") return FinishReason::refused;
  return FinishReason::complete;
}

}  // namespace

HttpTransport::HttpTransport(std::string endpoint, std::string api_key, std::chrono::seconds timeout)
    : api_key_(std::move(api_key)), timeout_(timeout) {
  auto [origin, path] = split_url(endpoint);
  origin_ = std::move(origin);
  path_ = std::move(path);
}

std::string HttpTransport::post_json(const std::string& body) {
  httplib::Client client(origin_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  auto result = client.Post(path_, headers, body, "application/json");
  if (!result) throw TransportError("http error: " + httplib::to_string(result.error()));
  if (result->status < 200 || result->status >= 300)
    throw TransportError("http status " + std::to_string(result->status));
  return result->body;
}

ChatCompletionProvider::ChatCompletionProvider(std::string model, std::unique_ptr<Transport> transport,
                                               RetryPolicy retry, std::size_t max_in_flight)
    : Provider(max_in_flight), model_(std::move(model)), transport_(std::move(transport)), retry_(retry) {
  if (!transport_) throw ConfigError("llm.endpoint", "no transport configured");
}

PromptResponse ChatCompletionProvider::do_complete(const PromptRequest& request) {
  nlohmann::json body = {{"model", model_},
                         {"temperature", request.temperature},
                         {"max_tokens", request.max_output_tokens},
                         {"messages", nlohmann::json::array()}};
  if (!request.system_text.empty())
    body["messages"].push_back({{"role", "system"}, {"content", request.system_text}});
  body["messages"].push_back({{"role", "user"}, {"content", request.user_text}});
  const std::string payload = body.dump();

  PromptResponse response;
  response.provider_id = id();
  for (int attempt = 0; attempt <= retry_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(retry_.backoff);
    ++attempts_;
    std::string raw;
    try {
      raw = transport_->post_json(payload);
    } catch (const TransportError&) {
      continue;
    }
    const auto doc = nlohmann::json::parse(raw, nullptr, false);
    if (doc.is_discarded() || !doc.contains("choices") || doc["choices"].empty()) continue;
    const auto& choice = doc["choices"][0];
    if (choice.contains("message") && choice["message"].contains("content") && choice["message"]["content"].is_string())
      response.text = choice["message"]["content"].get<std::string>();
    const std::string reason =
        choice.contains("finish_reason") && choice["finish_reason"].is_string() ? choice["finish_reason"].get<std::string>() : "stop";
    response.finish_reason = map_finish_reason(reason);
    if (choice.contains("message") && choice["message"].contains("refusal") && choice["message"]["refusal"].is_string())
      response.finish_reason = FinishReason::refused;
    return response;
  }
  response.text.clear();
  response.finish_reason = FinishReason::transport_error;
  return response;
}

}  // namespace dbfuzz::llm
