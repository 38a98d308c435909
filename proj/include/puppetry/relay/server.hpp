#pragma once

#include <atomic>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "puppetry/relay/broker.hpp"
#include "puppetry/relay/socket.hpp"

namespace puppetry::relay {

/// Serves the frame protocol over TCP. One reader thread per connection;
/// writes go through the connection's Outbox thread.
class TcpRelayServer {
 public:
  TcpRelayServer(Broker& broker, std::uint16_t port, const std::string& host = "127.0.0.1");
  ~TcpRelayServer();

  TcpRelayServer(const TcpRelayServer&) = delete;
  TcpRelayServer& operator=(const TcpRelayServer&) = delete;

  std::uint16_t port() const { return port_; }
  void stop();

 private:
  struct Connection;

  void accept_loop();
  void serve(std::shared_ptr<Connection> conn);
  void reap_finished();

  Broker& broker_;
  std::uint16_t port_ = 0;
  Socket listener_;
  std::atomic<bool> stopping_{false};
  std::thread acceptor_;
  std::mutex mu_;
  std::list<std::shared_ptr<Connection>> connections_;
};

/// Carries the same frames as binary websocket messages, one frame per
/// message, for browser clients.
class WsBridgeServer {
 public:
  WsBridgeServer(Broker& broker, std::uint16_t port, const std::string& host = "127.0.0.1");
  ~WsBridgeServer();

  WsBridgeServer(const WsBridgeServer&) = delete;
  WsBridgeServer& operator=(const WsBridgeServer&) = delete;

  std::uint16_t port() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace puppetry::relay
