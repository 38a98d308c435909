#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace puppetry::relay {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 7447;

  /// Parses "host:port" (or a bare port). Throws Error(InvalidArgument).
  static Endpoint parse(const std::string& text);
  std::string to_string() const;
};

/// Owning wrapper around a connected stream socket descriptor.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket();

  Socket(Socket&& other) noexcept;
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }

  /// Blocks until every byte is written. Returns false if the peer is gone.
  bool write_all(std::span<const std::uint8_t> bytes);

  /// Returns bytes read; 0 on orderly close or error.
  std::size_t read_some(std::span<std::uint8_t> buffer);

  /// Wakes blocked readers/writers without releasing the descriptor.
  void shutdown();
  void close();

 private:
  int fd_ = -1;
};

/// Throws Error(Connectivity) when the endpoint cannot be reached.
Socket connect_tcp(const Endpoint& endpoint);

/// Listening socket bound to host:port (port 0 picks a free port).
Socket listen_tcp(const std::string& host, std::uint16_t port, std::uint16_t& bound_port);

}  // namespace puppetry::relay
