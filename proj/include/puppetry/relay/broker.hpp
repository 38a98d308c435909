#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>

#include "puppetry/relay/fault.hpp"
#include "puppetry/relay/frame.hpp"

namespace puppetry::relay {

/// Topic table plus one Outbox per attached connection. Carriers (TCP,
/// websocket, in-process) attach a sink and feed received frames to handle().
class Broker {
 public:
  using ConnectionId = std::uint64_t;

  struct Options {
    FaultProfile faults;
    std::uint64_t seed = 0;
    /// Forward puppet/<id>/pose publishes to robot/<id>/cmd subscribers.
    bool mirror_puppet_pose = true;
  };

  Broker() : Broker(Options{}) {}
  explicit Broker(Options options);
  ~Broker();

  Broker(const Broker&) = delete;
  Broker& operator=(const Broker&) = delete;

  ConnectionId attach(Outbox::Sink sink);
  void detach(ConnectionId id);

  /// Dispatches one inbound frame from `from`. PING is answered with PONG on
  /// the same connection without faults.
  void handle(ConnectionId from, const Frame& frame);

  void subscribe(ConnectionId id, const std::string& topic);
  void unsubscribe(ConnectionId id, const std::string& topic);
  void publish(const std::string& topic, const Bytes& payload);

  std::size_t connection_count() const;
  std::size_t subscriber_count(const std::string& topic) const;
  OutboxStats stats(ConnectionId id) const;
  const Options& options() const { return options_; }

 private:
  void deliver_locked(const std::string& subscribed_topic, const Frame& frame);

  Options options_;
  mutable std::mutex mu_;
  ConnectionId next_id_ = 1;
  std::map<ConnectionId, std::shared_ptr<Outbox>> outboxes_;
  std::map<std::string, std::set<ConnectionId>> subscribers_;
};

}  // namespace puppetry::relay
