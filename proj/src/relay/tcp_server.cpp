#include <poll.h>
#include <sys/socket.h>

#include <array>

#include "puppetry/core/error.hpp"
#include "puppetry/relay/server.hpp"

namespace puppetry::relay {

struct TcpRelayServer::Connection {
  Socket socket;
  std::thread reader;
  std::atomic<bool> done{false};
};

TcpRelayServer::TcpRelayServer(Broker& broker, std::uint16_t port, const std::string& host)
    : broker_(broker), listener_(listen_tcp(host, port, port_)) {
  acceptor_ = std::thread([this] { accept_loop(); });
}

TcpRelayServer::~TcpRelayServer() { stop(); }

void TcpRelayServer::stop() {
  if (stopping_.exchange(true)) return;
  listener_.shutdown();
  if (acceptor_.joinable()) acceptor_.join();
  std::list<std::shared_ptr<Connection>> conns;
  {
    std::lock_guard lock(mu_);
    conns.swap(connections_);
  }
  for (auto& c : conns) c->socket.shutdown();
  for (auto& c : conns) {
    if (c->reader.joinable()) c->reader.join();
  }
  listener_.close();
}

void TcpRelayServer::accept_loop() {
  while (!stopping_) {
    pollfd pfd{listener_.fd(), POLLIN, 0};
    const int rc = ::poll(&pfd, 1, 200);
    if (stopping_) break;
    if (rc <= 0) {
      reap_finished();
      continue;
    }
    const int fd = ::accept(listener_.fd(), nullptr, nullptr);
    if (fd < 0) continue;
    auto conn = std::make_shared<Connection>();
    conn->socket = Socket(fd);
    std::lock_guard lock(mu_);
    connections_.push_back(conn);
    conn->reader = std::thread([this, conn] { serve(conn); });
  }
}

void TcpRelayServer::reap_finished() {
  std::list<std::shared_ptr<Connection>> finished;
  {
    std::lock_guard lock(mu_);
    for (auto it = connections_.begin(); it != connections_.end();) {
      if ((*it)->done) {
        finished.push_back(*it);
        it = connections_.erase(it);
      } else {
        ++it;
      }
    }
  }
  for (auto& c : finished) {
    if (c->reader.joinable()) c->reader.join();
  }
}

void TcpRelayServer::serve(std::shared_ptr<Connection> conn) {
  Socket& sock = conn->socket;
  const auto id = broker_.attach([&sock](const Frame& f) { return sock.write_all(encode_frame(f)); });
  FrameReader reader;
  std::array<std::uint8_t, 8192> buf{};
  try {
    for (;;) {
      const std::size_t n = sock.read_some(buf);
      if (n == 0) break;
      reader.feed(std::span(buf.data(), n));
      while (auto frame = reader.next()) broker_.handle(id, *frame);
    }
  } catch (const Error&) {
    // Malformed stream: drop the connection.
  }
  sock.shutdown();
  broker_.detach(id);
  conn->done = true;
}

}  // namespace puppetry::relay
