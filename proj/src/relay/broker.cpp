#include "puppetry/relay/broker.hpp"

#include <vector>

#include "puppetry/core/error.hpp"
#include "puppetry/relay/topics.hpp"

namespace puppetry::relay {
namespace {

// splitmix64 step: decorrelates per-connection RNG streams from one seed.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

Broker::Broker(Options options) : options_(std::move(options)) { options_.faults.validate(); }

Broker::~Broker() {
  std::map<ConnectionId, std::shared_ptr<Outbox>> doomed;
  {
    std::lock_guard lock(mu_);
    doomed.swap(outboxes_);
    subscribers_.clear();
  }
  for (auto& [id, box] : doomed) box->close();
}

Broker::ConnectionId Broker::attach(Outbox::Sink sink) {
  std::lock_guard lock(mu_);
  const ConnectionId id = next_id_++;
  outboxes_.emplace(id, std::make_shared<Outbox>(std::move(sink), options_.faults, mix(options_.seed ^ mix(id))));
  return id;
}

void Broker::detach(ConnectionId id) {
  std::shared_ptr<Outbox> box;
  {
    std::lock_guard lock(mu_);
    auto it = outboxes_.find(id);
    if (it == outboxes_.end()) return;
    box = std::move(it->second);
    outboxes_.erase(it);
    for (auto sit = subscribers_.begin(); sit != subscribers_.end();) {
      sit->second.erase(id);
      sit = sit->second.empty() ? subscribers_.erase(sit) : std::next(sit);
    }
  }
  box->close();
}

void Broker::handle(ConnectionId from, const Frame& frame) {
  switch (frame.type) {
    case FrameType::Publish:
      publish(frame.topic, frame.payload);
      return;
    case FrameType::Subscribe:
      subscribe(from, frame.topic);
      return;
    case FrameType::Unsubscribe:
      unsubscribe(from, frame.topic);
      return;
    case FrameType::Ping: {
      std::lock_guard lock(mu_);
      if (auto it = outboxes_.find(from); it != outboxes_.end()) {
        it->second->push(Frame{FrameType::Pong, {}, {}}, false);
      }
      return;
    }
    case FrameType::Pong:
      return;
  }
  throw Error(ErrorCode::Protocol, "unknown frame type");
}

void Broker::subscribe(ConnectionId id, const std::string& topic) {
  std::lock_guard lock(mu_);
  if (!outboxes_.contains(id)) return;
  subscribers_[topic].insert(id);
}

void Broker::unsubscribe(ConnectionId id, const std::string& topic) {
  std::lock_guard lock(mu_);
  auto it = subscribers_.find(topic);
  if (it == subscribers_.end()) return;
  it->second.erase(id);
  if (it->second.empty()) subscribers_.erase(it);
}

void Broker::publish(const std::string& topic, const Bytes& payload) {
  std::lock_guard lock(mu_);
  deliver_locked(topic, make_publish(topic, payload));
  if (options_.mirror_puppet_pose) {
    if (auto target = topics::mirror_target(topic)) deliver_locked(*target, make_publish(*target, payload));
  }
}

void Broker::deliver_locked(const std::string& subscribed_topic, const Frame& frame) {
  auto it = subscribers_.find(subscribed_topic);
  if (it == subscribers_.end()) return;
  const bool faulty = topics::is_telemetry(subscribed_topic);
  for (ConnectionId id : it->second) {
    if (auto box = outboxes_.find(id); box != outboxes_.end()) box->second->push(frame, faulty);
  }
}

std::size_t Broker::connection_count() const {
  std::lock_guard lock(mu_);
  return outboxes_.size();
}

std::size_t Broker::subscriber_count(const std::string& topic) const {
  std::lock_guard lock(mu_);
  auto it = subscribers_.find(topic);
  return it == subscribers_.end() ? 0 : it->second.size();
}

OutboxStats Broker::stats(ConnectionId id) const {
  std::lock_guard lock(mu_);
  auto it = outboxes_.find(id);
  return it == outboxes_.end() ? OutboxStats{} : it->second->stats();
}

}  // namespace puppetry::relay
