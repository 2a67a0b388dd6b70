#pragma once

#include <memory>
#include <string>

#include <json.hpp>

#include "dbfuzz/llm/provider.hpp"

namespace dbfuzz::llm {

/// The `llm` block of a campaign config.
///
///   {"provider": "mock", "mock_script": "mock.json"}
///   {"provider": "chat", "endpoint": "https://...", "model": "gpt-4",
///    "api_key_env": "OPENAI_API_KEY", "timeout_seconds": 60}
struct ProviderConfig {
  std::string provider;
  std::string mock_script;
  std::string endpoint;
  std::string model;
  std::string api_key_env;
  int timeout_seconds = 60;
  int max_retries = 3;
  int backoff_ms = 500;
  std::size_t max_in_flight = 4;

  /// `base_dir` resolves relative file paths. Field errors carry `prefix`.
  static ProviderConfig from_json(const nlohmann::json& block, const std::string& base_dir = "",
                                  const std::string& prefix = "llm");
};

/// Throws ConfigError when no provider is configured or a field is invalid.
std::unique_ptr<Provider> make_provider(const ProviderConfig& config);

}  // namespace dbfuzz::llm
