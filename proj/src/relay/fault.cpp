#include "puppetry/relay/fault.hpp"

#include <algorithm>

#include "puppetry/core/error.hpp"

namespace puppetry::relay {

void FaultProfile::validate() const {
  if (!(drop_probability >= 0.0 && drop_probability <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "drop probability must be within [0, 1]");
  }
}

Outbox::Outbox(Sink sink, FaultProfile faults, std::uint64_t seed)
    : sink_(std::move(sink)), faults_(faults), seed_(seed) {
  faults_.validate();
  worker_ = std::thread([this] { run(); });
}

Outbox::~Outbox() {
  close();
  if (worker_.joinable()) worker_.join();
}

std::mt19937_64& Outbox::stream_for(const std::string& topic) {
  auto it = streams_.find(topic);
  if (it == streams_.end()) {
    // FNV-1a keeps the topic hash stable across platforms and runs.
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : topic) h = (h ^ c) * 0x100000001B3ull;
    it = streams_.emplace(topic, std::mt19937_64(seed_ ^ h)).first;
  }
  return it->second;
}

void Outbox::push(Frame frame, bool apply_faults) {
  std::lock_guard lock(mu_);
  if (closed_) return;
  ++stats_.accepted;
  auto due = Clock::now();
  if (apply_faults && faults_.active()) {
    auto& rng = stream_for(frame.topic);
    if (faults_.drop_probability > 0.0 &&
        std::bernoulli_distribution(faults_.drop_probability)(rng)) {
      ++stats_.dropped;
      return;
    }
    std::int64_t delay = faults_.base_latency_ms;
    if (faults_.jitter_ms > 0) {
      const auto j = static_cast<std::int64_t>(faults_.jitter_ms);
      delay += std::uniform_int_distribution<std::int64_t>(-j, j)(rng);
    }
    due += std::chrono::milliseconds(std::max<std::int64_t>(delay, 0));
  }
  due = std::max(due, last_due_);
  last_due_ = due;
  queue_.push_back({due, std::move(frame)});
  cv_.notify_one();
}

void Outbox::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

OutboxStats Outbox::stats() const {
  std::lock_guard lock(mu_);
  return stats_;
}

void Outbox::run() {
  std::unique_lock lock(mu_);
  for (;;) {
    cv_.wait(lock, [&] { return closed_ || !queue_.empty(); });
    if (closed_) return;
    const auto due = queue_.front().due;
    if (Clock::now() < due) {
      cv_.wait_until(lock, due, [&] { return closed_; });
      continue;
    }
    Frame frame = std::move(queue_.front().frame);
    queue_.pop_front();
    lock.unlock();
    const bool ok = sink_(frame);
    lock.lock();
    if (!ok) {
      closed_ = true;
      queue_.clear();
      return;
    }
    ++stats_.delivered;
  }
}

}  // namespace puppetry::relay
