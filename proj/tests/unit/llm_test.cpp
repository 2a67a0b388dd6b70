#include <gtest/gtest.h>

#include <thread>

#include "dbfuzz/common/error.hpp"
#include "dbfuzz/common/hash.hpp"
#include "dbfuzz/llm/http_provider.hpp"
#include "dbfuzz/llm/mock_provider.hpp"
#include "dbfuzz/llm/provider_config.hpp"
#include "test_support.hpp"

namespace dbfuzz::llm {
namespace {

PromptRequest request(std::string user, std::string tag = "t") {
  PromptRequest r;
  r.user_text = std::move(user);
  r.tag = std::move(tag);
  return r;
}

MockScript script_of(const char* doc) { return MockScript::from_json(nlohmann::json::parse(doc)); }

TEST(MockProvider, SubstringMatchAnswersCannedText) {
  MockProvider mock(script_of(R"({"entries":[{"contains":"state-transition rules","response":"connect\nclose"}]})"));
  const PromptResponse r = mock.complete(request("Based on the state-transition rules, list calls"));
  EXPECT_EQ(r.text, "connect\nclose");
  EXPECT_EQ(r.finish_reason, FinishReason::complete);
  EXPECT_EQ(r.provider_id, "mock");
}

TEST(MockProvider, FirstMatchWins) {
  MockProvider mock(script_of(R"({"entries":[{"contains":"ab","response":"first"},{"contains":"a","response":"second"}]})"));
  EXPECT_EQ(mock.complete(request("xaby")).text, "first");
  EXPECT_EQ(mock.complete(request("xay")).text, "second");
}

TEST(MockProvider, HashMatcherUsesContentHash) {
  const std::string user = "exact prompt";
  nlohmann::json doc{{"entries", {{{"hash", content_hash(user)}, {"response", "hit"}}}}, {"fallback", "miss"}};
  MockProvider mock(MockScript::from_json(doc));
  EXPECT_EQ(mock.complete(request(user)).text, "hit");
  EXPECT_EQ(mock.complete(request(user + " ")).text, "miss");
}

TEST(MockProvider, EmptyFallbackRefuses) {
  MockProvider mock(MockScript{});
  const PromptResponse r = mock.complete(request("anything"));
  EXPECT_EQ(r.finish_reason, FinishReason::refused);
  EXPECT_TRUE(r.text.empty());
}

TEST(MockProvider, ScriptedFinishReasonIsKept) {
  MockProvider mock(script_of(R"({"entries":[{"contains":"x","response":"no","finish_reason":"refused"}]})"));
  EXPECT_EQ(mock.complete(request("x")).finish_reason, FinishReason::refused);
}

TEST(MockProvider, LongAnswerSurfacesAsTruncated) {
  MockProvider mock(script_of(R"({"fallback":"one two three four five"})"));
  PromptRequest r = request("q");
  r.max_output_tokens = 3;
  const PromptResponse resp = mock.complete(r);
  EXPECT_EQ(resp.finish_reason, FinishReason::truncated);
  EXPECT_EQ(resp.text, "one two three");
}

TEST(MockProvider, RepeatedRequestsAreByteIdentical) {
  MockProvider mock(MockScript::load(testing::data_path("mock/treatment.json")));
  const PromptRequest r = request("Case: pg-orders\nSource dialect: postgresql");
  const std::string first = content_hash(mock.complete(r).text);
  MockProvider reloaded(MockScript::load(testing::data_path("mock/treatment.json")));
  for (int i = 0; i < 5; ++i) EXPECT_EQ(content_hash(reloaded.complete(r).text), first);
  EXPECT_EQ(reloaded.call_count(), 5u);
}

TEST(MockProvider, ScriptRoundTripsThroughJson) {
  const MockScript s = MockScript::load(testing::data_path("mock/treatment.json"));
  const MockScript again = MockScript::from_json(s.to_json());
  ASSERT_EQ(again.entries.size(), s.entries.size());
  EXPECT_EQ(again.entries.front().pattern, s.entries.front().pattern);
}

TEST(PromptRequest, InvariantsAreEnforced) {
  MockProvider mock(MockScript{});
  EXPECT_THROW(mock.complete(request("")), PreconditionError);
  PromptRequest hot = request("q");
  hot.temperature = 1.5;
  EXPECT_THROW(mock.complete(hot), PreconditionError);
  PromptRequest zero = request("q");
  zero.max_output_tokens = 0;
  EXPECT_THROW(mock.complete(zero), PreconditionError);
}

TEST(ProviderConfig, MissingProviderIsConfigError) {
  try {
    make_provider(ProviderConfig{});
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "llm.provider");
  }
  ProviderConfig chat;
  chat.provider = "chat";
  EXPECT_THROW(make_provider(chat), ConfigError);
  ProviderConfig odd;
  odd.provider = "oracle";
  EXPECT_THROW(make_provider(odd), ConfigError);
}

TEST(ProviderConfig, FieldTypesAreChecked) {
  EXPECT_THROW(ProviderConfig::from_json(nlohmann::json::parse(R"({"provider":"mock","timeout_seconds":"x"})")), ConfigError);
  EXPECT_THROW(ProviderConfig::from_json(nlohmann::json::parse(R"({"provider":"mock","timeout_seconds":0})")), ConfigError);
  const auto c = ProviderConfig::from_json(nlohmann::json::parse(R"({"provider":"mock","mock_script":"m.json"})"), "/base");
  EXPECT_EQ(c.mock_script, "/base/m.json");
}

class FlakyTransport final : public Transport {
 public:
  FlakyTransport(int failures, std::string body) : failures_(failures), body_(std::move(body)) {}
  std::string post_json(const std::string& body) override {
    last_request = body;
    if (failures_-- > 0) throw TransportError("connection reset");
    return body_;
  }
  std::string last_request;

 private:
  int failures_;
  std::string body_;
};

TEST(ChatProvider, RetriesTransportFailures) {
  auto transport = std::make_unique<FlakyTransport>(2, R"({"choices":[{"message":{"content":"hi"},"finish_reason":"stop"}]})");
  FlakyTransport* raw = transport.get();
  ChatCompletionProvider p("m1", std::move(transport), RetryPolicy{3, std::chrono::milliseconds(0)});
  PromptRequest r = request("hello");
  r.system_text = "sys";
  const PromptResponse resp = p.complete(r);
  EXPECT_EQ(resp.text, "hi");
  EXPECT_EQ(resp.finish_reason, FinishReason::complete);
  EXPECT_EQ(resp.provider_id, "chat:m1");
  EXPECT_EQ(p.attempts(), 3u);
  const auto sent = nlohmann::json::parse(raw->last_request);
  EXPECT_EQ(sent["model"], "m1");
  EXPECT_EQ(sent["messages"].size(), 2u);
}

TEST(ChatProvider, GivesUpAfterConfiguredRetries) {
  ChatCompletionProvider p("m", std::make_unique<FlakyTransport>(10, "{}"), RetryPolicy{3, std::chrono::milliseconds(0)});
  const PromptResponse resp = p.complete(request("hello"));
  EXPECT_EQ(resp.finish_reason, FinishReason::transport_error);
  EXPECT_EQ(p.attempts(), 4u);
}

TEST(ChatProvider, MapsLengthAndFilterReasons) {
  ChatCompletionProvider a("m", std::make_unique<FlakyTransport>(0, R"({"choices":[{"message":{"content":"par"},"finish_reason":"length"}]})"),
                           RetryPolicy{0, std::chrono::milliseconds(0)});
  EXPECT_EQ(a.complete(request("q")).finish_reason, FinishReason::truncated);
  ChatCompletionProvider b("m", std::make_unique<FlakyTransport>(0, R"({"choices":[{"message":{"content":"","refusal":"no"}}]})"),
                           RetryPolicy{0, std::chrono::milliseconds(0)});
  EXPECT_EQ(b.complete(request("q")).finish_reason, FinishReason::refused);
}

TEST(Provider, ConcurrentCallsAreSafe) {
  MockProvider mock(MockScript::from_json(nlohmann::json::parse(R"({"fallback":"ok"})")), 2);
  std::vector<std::thread> threads;
  std::atomic<int> ok{0};
  for (int t = 0; t < 8; ++t)
    threads.emplace_back([&] {
      for (int i = 0; i < 50; ++i)
        if (mock.complete(request("q")).text == "ok") ++ok;
    });
  for (auto& t : threads) t.join();
  EXPECT_EQ(ok.load(), 400);
}

TEST(Tokens, CountAndTruncate) {
  EXPECT_EQ(count_tokens("  a  bb\tc\n"), 3u);
  EXPECT_EQ(truncate_tokens("a  bb c", 2), "a  bb");
  EXPECT_EQ(truncate_tokens("a b", 5), "a b");
}

}  // namespace
}  // namespace dbfuzz::llm
