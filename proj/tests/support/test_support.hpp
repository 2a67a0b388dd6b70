#pragma once

#include <deque>
#include <filesystem>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "dbfuzz/llm/provider.hpp"

namespace dbfuzz::testing {

inline std::string data_path(const std::string& relative) { return std::string(DBFUZZ_DATA_DIR) + "/" + relative; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("dbfuzz-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& child = "") const { return child.empty() ? path_.string() : (path_ / child).string(); }

 private:
  std::filesystem::path path_;
};

/// Answers from a queue in call order and refuses once it runs dry. Keeps
/// every request for inspection.
class QueueProvider final : public llm::Provider {
 public:
  QueueProvider() = default;
  explicit QueueProvider(std::vector<std::string> answers) {
    for (auto& a : answers) push(std::move(a));
  }

  void push(std::string text, llm::FinishReason reason = llm::FinishReason::complete) {
    std::lock_guard lock(mutex_);
    queue_.push_back({std::move(text), reason, "", {}});
  }
  std::string id() const override { return "queue"; }
  std::vector<llm::PromptRequest> requests() const {
    std::lock_guard lock(mutex_);
    return requests_;
  }

 protected:
  llm::PromptResponse do_complete(const llm::PromptRequest& request) override {
    std::lock_guard lock(mutex_);
    requests_.push_back(request);
    if (queue_.empty()) return {"", llm::FinishReason::refused, "", {}};
    llm::PromptResponse r = queue_.front();
    queue_.pop_front();
    return r;
  }

 private:
  mutable std::mutex mutex_;
  std::deque<llm::PromptResponse> queue_;
  std::vector<llm::PromptRequest> requests_;
};

}  // namespace dbfuzz::testing
