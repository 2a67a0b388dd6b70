#pragma once

#include <condition_variable>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "dbfuzz/common/error.hpp"
#include "dbfuzz/monitor/log_event.hpp"
#include "dbfuzz/sql/executor.hpp"

namespace dbfuzz::monitor {

using EventSink = std::function<void(const LogEvent&)>;

class ChannelUnavailable : public Error {
 public:
  using Error::Error;
};

/// Parses pushed lines on a consumer thread and delivers them to the sink in
/// push order. The queue is bounded: push blocks while it is full, so a slow
/// sink slows the producer instead of losing lines.
class Agent {
 public:
  Agent(EventSink sink, std::size_t capacity = 4096);
  ~Agent();
  Agent(const Agent&) = delete;
  Agent& operator=(const Agent&) = delete;

  void push(std::string line);
  /// Blocks until every pushed line has been delivered.
  void flush();
  /// Drains the queue, then joins the consumer.
  void stop();
  std::uint64_t delivered() const;

 private:
  void consume();

  EventSink sink_;
  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::condition_variable not_empty_;
  std::condition_variable not_full_;
  std::condition_variable drained_;
  std::deque<std::string> queue_;
  std::uint64_t pushed_ = 0;
  std::uint64_t delivered_ = 0;
  bool stopping_ = false;
  std::thread consumer_;
};

/// Live attachment of an agent to a log channel. Destruction detaches the
/// source first, then drains the agent.
class Subscription {
 public:
  virtual ~Subscription() = default;
  /// Waits until every line emitted so far has reached the sink.
  virtual void flush() = 0;
  virtual std::uint64_t delivered() const = 0;
};

/// Subscribes to the executor's log stream. Throws ChannelUnavailable when the
/// executor is not running.
std::unique_ptr<Subscription> attach_agent(sql::Executor& target, EventSink sink, std::size_t capacity = 4096);

/// Tails a log file from its beginning, following appended lines. Throws
/// ChannelUnavailable when the file cannot be opened.
std::unique_ptr<Subscription> attach_file_agent(const std::string& path, EventSink sink, std::size_t capacity = 4096);

}  // namespace dbfuzz::monitor
