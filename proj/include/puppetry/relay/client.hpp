#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "puppetry/relay/frame.hpp"
#include "puppetry/relay/socket.hpp"

namespace puppetry::relay {

/// Blocking client for the TCP frame protocol. A background thread decodes
/// inbound frames into a queue drained by receive(). Sends are serialized, so
/// one client may be shared by several threads.
class RelayClient {
 public:
  /// Throws Error(Connectivity).
  explicit RelayClient(const Endpoint& endpoint);
  ~RelayClient();

  RelayClient(const RelayClient&) = delete;
  RelayClient& operator=(const RelayClient&) = delete;

  void publish(const std::string& topic, const Bytes& payload);
  void publish_text(const std::string& topic, const std::string& text);
  void subscribe(const std::string& topic);
  void unsubscribe(const std::string& topic);
  void ping();

  /// Next inbound frame, waiting up to `timeout`. Throws Error(Protocol) if the
  /// relay sent a malformed stream.
  std::optional<Frame> receive(std::chrono::milliseconds timeout);

  bool connected() const;
  void close();

 private:
  void send(const Frame& frame);
  void read_loop();

  Socket socket_;
  std::mutex write_mu_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Frame> inbox_;
  bool open_ = true;
  std::optional<std::string> protocol_error_;
  std::thread reader_;
};

}  // namespace puppetry::relay
