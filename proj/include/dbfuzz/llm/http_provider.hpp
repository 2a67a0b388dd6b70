#pragma once

#include <atomic>
#include <chrono>
#include <memory>
#include <string>

#include "dbfuzz/llm/provider.hpp"

namespace dbfuzz::llm {

/// Raised by a Transport when a request did not produce an HTTP 2xx reply.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// POSTs a JSON body and returns the response body.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::string post_json(const std::string& body) = 0;
};

/// cpp-httplib backed transport. `endpoint` is a full URL such as
/// https://api.openai.com/v1/chat/completions.
class HttpTransport final : public Transport {
 public:
  HttpTransport(std::string endpoint, std::string api_key, std::chrono::seconds timeout);
  std::string post_json(const std::string& body) override;

 private:
  std::string origin_;
  std::string path_;
  std::string api_key_;
  std::chrono::seconds timeout_;
};

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds backoff{500};
};

/// OpenAI-compatible chat completion provider.
class ChatCompletionProvider final : public Provider {
 public:
  ChatCompletionProvider(std::string model, std::unique_ptr<Transport> transport, RetryPolicy retry = {},
                         std::size_t max_in_flight = 4);

  std::string id() const override { return "chat:" + model_; }
  std::size_t attempts() const { return attempts_; }

 protected:
  PromptResponse do_complete(const PromptRequest& request) override;

 private:
  std::string model_;
  std::unique_ptr<Transport> transport_;
  RetryPolicy retry_;
  std::atomic<std::size_t> attempts_{0};
};

}  // namespace dbfuzz::llm
