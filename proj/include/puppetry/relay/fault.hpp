#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include "puppetry/relay/frame.hpp"

namespace puppetry::relay {

struct FaultProfile {
  std::uint32_t base_latency_ms = 0;
  std::uint32_t jitter_ms = 0;      // uniform in [-jitter, +jitter], total clamped at 0
  double drop_probability = 0.0;    // [0, 1]; 1 drops everything

  bool active() const { return base_latency_ms != 0 || jitter_ms != 0 || drop_probability != 0.0; }

  /// Throws Error(InvalidArgument) when drop_probability is outside [0, 1].
  void validate() const;
};

struct OutboxStats {
  std::uint64_t accepted = 0;
  std::uint64_t dropped = 0;
  std::uint64_t delivered = 0;
};

/// Per-subscriber delivery queue. Frames subject to faults are dropped or
/// delayed here; delays never reorder because each due time is at least the
/// previous one. A dedicated thread hands frames to the sink in FIFO order.
///
/// Each topic draws from its own random stream, so the fate of the n-th frame
/// on a topic does not depend on how other topics interleave with it.
class Outbox {
 public:
  using Clock = std::chrono::steady_clock;
  /// Returns false when the carrier is gone; the outbox then stops delivering.
  using Sink = std::function<bool(const Frame&)>;

  Outbox(Sink sink, FaultProfile faults, std::uint64_t seed);
  ~Outbox();

  Outbox(const Outbox&) = delete;
  Outbox& operator=(const Outbox&) = delete;

  void push(Frame frame, bool apply_faults);
  void close();
  OutboxStats stats() const;

 private:
  struct Pending {
    Clock::time_point due;
    Frame frame;
  };

  void run();

  std::mt19937_64& stream_for(const std::string& topic);

  Sink sink_;
  FaultProfile faults_;
  std::uint64_t seed_;
  std::map<std::string, std::mt19937_64> streams_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Pending> queue_;
  Clock::time_point last_due_{};
  OutboxStats stats_;
  bool closed_ = false;
  std::thread worker_;
};

}  // namespace puppetry::relay
