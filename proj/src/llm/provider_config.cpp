#include "dbfuzz/llm/provider_config.hpp"

#include <cstdlib>
#include <filesystem>

#include "dbfuzz/common/error.hpp"
#include "dbfuzz/llm/http_provider.hpp"
#include "dbfuzz/llm/mock_provider.hpp"

namespace dbfuzz::llm {

namespace {

std::string resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty() || base_dir.empty() || std::filesystem::path(path).is_absolute()) return path;
  return (std::filesystem::path(base_dir) / path).string();
}

template <typename T>
T field(const nlohmann::json& block, const char* key, T fallback, const std::string& prefix) {
  if (!block.contains(key)) return fallback;
  try {
    return block.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(prefix + "." + key, "has the wrong type");
  }
}

}  // namespace

ProviderConfig ProviderConfig::from_json(const nlohmann::json& block, const std::string& base_dir,
                                         const std::string& prefix) {
  if (!block.is_object()) throw ConfigError(prefix, "must be an object");
  ProviderConfig c;
  c.provider = field<std::string>(block, "provider", "", prefix);
  c.mock_script = resolve(base_dir, field<std::string>(block, "mock_script", "", prefix));
  c.endpoint = field<std::string>(block, "endpoint", "", prefix);
  c.model = field<std::string>(block, "model", "", prefix);
  c.api_key_env = field<std::string>(block, "api_key_env", "", prefix);
  c.timeout_seconds = field<int>(block, "timeout_seconds", 60, prefix);
  c.max_retries = field<int>(block, "max_retries", 3, prefix);
  c.backoff_ms = field<int>(block, "backoff_ms", 500, prefix);
  c.max_in_flight = field<std::size_t>(block, "max_in_flight", 4, prefix);
  if (c.timeout_seconds <= 0) throw ConfigError(prefix + ".timeout_seconds", "must be positive");
  if (c.max_retries < 0) throw ConfigError(prefix + ".max_retries", "must be non-negative");
  return c;
}

std::unique_ptr<Provider> make_provider(const ProviderConfig& config) {
  if (config.provider.empty()) throw ConfigError("llm.provider", "no provider configured");
  if (config.provider == "mock") {
    MockScript script = config.mock_script.empty() ? MockScript{} : MockScript::load(config.mock_script);
    return std::make_unique<MockProvider>(std::move(script), config.max_in_flight);
  }
  if (config.provider == "chat") {
    if (config.endpoint.empty()) throw ConfigError("llm.endpoint", "required for provider 'chat'");
    if (config.model.empty()) throw ConfigError("llm.model", "required for provider 'chat'");
    std::string key;
    if (!config.api_key_env.empty()) {
      const char* value = std::getenv(config.api_key_env.c_str());
      if (value == nullptr) throw ConfigError("llm.api_key_env", "environment variable " + config.api_key_env + " is not set");
      key = value;
    }
    auto transport =
        std::make_unique<HttpTransport>(config.endpoint, std::move(key), std::chrono::seconds(config.timeout_seconds));
    return std::make_unique<ChatCompletionProvider>(
        config.model, std::move(transport),
        RetryPolicy{config.max_retries, std::chrono::milliseconds(config.backoff_ms)}, config.max_in_flight);
  }
  throw ConfigError("llm.provider", "unknown provider '" + config.provider + "' (expected 'mock' or 'chat')");
}

}  // namespace dbfuzz::llm
