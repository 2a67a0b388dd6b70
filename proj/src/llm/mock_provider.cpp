#include "dbfuzz/llm/mock_provider.hpp"

#include "dbfuzz/common/error.hpp"
#include "dbfuzz/common/hash.hpp"
#include "dbfuzz/common/text.hpp"

namespace dbfuzz::llm {

bool MockEntry::matches(std::string_view user_text) const {
  if (match == Match::hash) return content_hash(user_text) == pattern;
  return user_text.find(pattern) != std::string_view::npos;
}

MockScript MockScript::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError(0, "", "mock script must be a JSON object");
  MockScript script;
  if (doc.contains("entries")) {
    const auto& entries = doc.at("entries");
    if (!entries.is_array()) throw ParseError(0, "entries", "must be an array");
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& e = entries[i];
      const std::string field = "entries[" + std::to_string(i) + "]";
      if (!e.is_object()) throw ParseError(0, field, "must be an object");
      MockEntry entry;
      if (e.contains("contains") && e.contains("hash")) throw ParseError(0, field, "give either 'contains' or 'hash'");
      if (e.contains("contains")) {
        entry.match = MockEntry::Match::substring;
        entry.pattern = e.at("contains").get<std::string>();
      } else if (e.contains("hash")) {
        entry.match = MockEntry::Match::hash;
        entry.pattern = e.at("hash").get<std::string>();
      } else {
        throw ParseError(0, field, "missing matcher ('contains' or 'hash')");
      }
      if (!e.contains("response")) throw ParseError(0, field + ".response", "missing");
      entry.response = e.at("response").get<std::string>();
      if (e.contains("finish_reason")) {
        auto reason = parse_finish_reason(e.at("finish_reason").get<std::string>());
        if (!reason) throw ParseError(0, field + ".finish_reason", "unknown finish reason");
        entry.finish_reason = *reason;
      }
      script.entries.push_back(std::move(entry));
    }
  }
  if (doc.contains("fallback")) script.fallback = doc.at("fallback").get<std::string>();
  return script;
}

MockScript MockScript::load(const std::string& path) {
  const std::string text = read_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, path, e.what());
  }
  return from_json(doc);
}

nlohmann::json MockScript::to_json() const {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : this->entries) {
    nlohmann::json j;
    j[e.match == MockEntry::Match::hash ? "hash" : "contains"] = e.pattern;
    j["response"] = e.response;
    if (e.finish_reason != FinishReason::complete) j["finish_reason"] = std::string(to_string(e.finish_reason));
    entries.push_back(std::move(j));
  }
  return {{"entries", entries}, {"fallback", fallback}};
}

MockProvider::MockProvider(MockScript script, std::size_t max_in_flight)
    : Provider(max_in_flight), script_(std::move(script)) {}

PromptResponse MockProvider::do_complete(const PromptRequest& request) {
  ++calls_;
  PromptResponse response;
  response.provider_id = id();
  const MockEntry* hit = nullptr;
  for (const auto& entry : script_.entries) {
    if (entry.matches(request.user_text)) {
      hit = &entry;
      break;
    }
  }
  if (hit != nullptr) {
    response.text = hit->response;
    response.finish_reason = hit->finish_reason;
  } else {
    response.text = script_.fallback;
    response.finish_reason = script_.fallback.empty() ? FinishReason::refused : FinishReason::complete;
  }
  if (response.finish_reason == FinishReason::complete && count_tokens(response.text) > request.max_output_tokens) {
    response.text = truncate_tokens(response.text, request.max_output_tokens);
    response.finish_reason = FinishReason::truncated;
  }
  return response;
}

}  // namespace dbfuzz::llm
