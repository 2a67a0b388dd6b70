#include "dbfuzz/monitor/agent.hpp"

#include <atomic>
#include <chrono>
#include <fstream>

namespace dbfuzz::monitor {

Agent::Agent(EventSink sink, std::size_t capacity) : sink_(std::move(sink)), capacity_(std::max<std::size_t>(1, capacity)) {
  consumer_ = std::thread([this] { consume(); });
}

Agent::~Agent() { stop(); }

void Agent::push(std::string line) {
  std::unique_lock lock(mutex_);
  not_full_.wait(lock, [&] { return queue_.size() < capacity_ || stopping_; });
  if (stopping_) throw PreconditionError("push to a stopped agent");
  queue_.push_back(std::move(line));
  ++pushed_;
  not_empty_.notify_one();
}

void Agent::flush() {
  std::unique_lock lock(mutex_);
  drained_.wait(lock, [&] { return delivered_ == pushed_; });
}

void Agent::stop() {
  {
    std::lock_guard lock(mutex_);
    if (stopping_ && !consumer_.joinable()) return;
    stopping_ = true;
  }
  not_empty_.notify_all();
  not_full_.notify_all();
  if (consumer_.joinable()) consumer_.join();
}

std::uint64_t Agent::delivered() const {
  std::lock_guard lock(mutex_);
  return delivered_;
}

void Agent::consume() {
  for (;;) {
    std::string line;
    {
      std::unique_lock lock(mutex_);
      not_empty_.wait(lock, [&] { return !queue_.empty() || stopping_; });
      if (queue_.empty()) return;
      line = std::move(queue_.front());
      queue_.pop_front();
      not_full_.notify_one();
    }
    sink_(parse_log_line(line));
    {
      std::lock_guard lock(mutex_);
      ++delivered_;
    }
    drained_.notify_all();
  }
}

namespace {

class ExecutorSubscription final : public Subscription {
 public:
  ExecutorSubscription(sql::Executor& target, EventSink sink, std::size_t capacity)
      : target_(target), agent_(std::move(sink), capacity) {
    handle_ = target_.add_log_listener([this](std::string_view line) { agent_.push(std::string(line)); });
  }
  ~ExecutorSubscription() override {
    target_.remove_log_listener(handle_);
    agent_.stop();
  }
  void flush() override { agent_.flush(); }
  std::uint64_t delivered() const override { return agent_.delivered(); }

 private:
  sql::Executor& target_;
  Agent agent_;
  std::size_t handle_ = 0;
};

class FileSubscription final : public Subscription {
 public:
  FileSubscription(const std::string& path, EventSink sink, std::size_t capacity)
      : in_(path), agent_(std::move(sink), capacity) {
    if (!in_) throw ChannelUnavailable("cannot open log file " + path);
    reader_ = std::thread([this] { tail(); });
  }
  ~FileSubscription() override {
    done_ = true;
    if (reader_.joinable()) reader_.join();
    agent_.stop();
  }
  void flush() override {
    // Wait for the reader to reach the current end of file, then drain.
    const std::uint64_t target = ++flush_requests_;
    while (caught_up_ < target) std::this_thread::sleep_for(std::chrono::milliseconds(1));
    agent_.flush();
  }
  std::uint64_t delivered() const override { return agent_.delivered(); }

 private:
  void tail() {
    std::string line;
    std::string pending;
    while (!done_) {
      const std::uint64_t requested = flush_requests_;
      while (std::getline(in_, line)) {
        if (in_.eof()) {
          // Partial last line: keep it until its newline arrives.
          pending += line;
          break;
        }
        agent_.push(pending + line);
        pending.clear();
      }
      in_.clear();
      caught_up_ = requested;
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    if (!pending.empty()) agent_.push(pending);
  }

  std::ifstream in_;
  Agent agent_;
  std::atomic<bool> done_{false};
  std::atomic<std::uint64_t> flush_requests_{0};
  std::atomic<std::uint64_t> caught_up_{0};
  std::thread reader_;
};

}  // namespace

std::unique_ptr<Subscription> attach_agent(sql::Executor& target, EventSink sink, std::size_t capacity) {
  if (!target.available()) throw ChannelUnavailable("target '" + target.name() + "' exposes no log channel");
  return std::make_unique<ExecutorSubscription>(target, std::move(sink), capacity);
}

std::unique_ptr<Subscription> attach_file_agent(const std::string& path, EventSink sink, std::size_t capacity) {
  return std::make_unique<FileSubscription>(path, std::move(sink), capacity);
}

}  // namespace dbfuzz::monitor
