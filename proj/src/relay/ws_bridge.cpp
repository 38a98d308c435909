#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <deque>
#include <thread>

#include "puppetry/core/error.hpp"
#include "puppetry/relay/server.hpp"

namespace puppetry::relay {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

namespace {

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket socket, Broker& broker) : ws_(std::move(socket)), broker_(broker) {}

  void start() {
    ws_.binary(true);
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      std::weak_ptr<WsSession> weak = self;
      self->id_ = self->broker_.attach([weak](const Frame& f) {
        auto s = weak.lock();
        if (!s) return false;
        auto bytes = std::make_shared<Bytes>(encode_frame(f));
        net::post(s->ws_.get_executor(), [s, bytes] { s->enqueue(bytes); });
        return true;
      });
      self->attached_ = true;
      self->read();
    });
  }

  // Only after the io thread has exited.
  void release() {
    if (attached_ && !finished_) {
      finished_ = true;
      broker_.detach(id_);
    }
  }

  void close() {
    net::post(ws_.get_executor(), [self = shared_from_this()] {
      beast::error_code ignored;
      self->ws_.next_layer().shutdown(tcp::socket::shutdown_both, ignored);
      self->ws_.next_layer().close(ignored);
    });
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->finish();
      const auto data = self->buffer_.cdata();
      std::span bytes(static_cast<const std::uint8_t*>(data.data()), data.size());
      try {
        self->broker_.handle(self->id_, decode_frame(bytes));
      } catch (const Error&) {
        return self->finish();
      }
      self->buffer_.consume(self->buffer_.size());
      self->read();
    });
  }

  void enqueue(std::shared_ptr<Bytes> bytes) {
    if (finished_) return;
    writes_.push_back(std::move(bytes));
    if (writes_.size() == 1) write_next();
  }

  void write_next() {
    ws_.async_write(net::buffer(*writes_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->finish();
      self->writes_.pop_front();
      if (!self->writes_.empty()) self->write_next();
    });
  }

  void finish() {
    if (finished_) return;
    finished_ = true;
    writes_.clear();
    beast::error_code ignored;
    ws_.next_layer().close(ignored);
    if (attached_) broker_.detach(id_);
  }

  websocket::stream<tcp::socket> ws_;
  Broker& broker_;
  Broker::ConnectionId id_ = 0;
  bool attached_ = false;
  bool finished_ = false;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<Bytes>> writes_;
};

}  // namespace

struct WsBridgeServer::Impl {
  Impl(Broker& b, std::uint16_t port, const std::string& host)
      : broker(b), acceptor(ioc) {
    beast::error_code ec;
    const tcp::endpoint ep(net::ip::make_address(host, ec), port);
    if (ec) throw Error(ErrorCode::InvalidArgument, "bad websocket listen address " + host);
    acceptor.open(ep.protocol(), ec);
    if (!ec) acceptor.set_option(net::socket_base::reuse_address(true), ec);
    if (!ec) acceptor.bind(ep, ec);
    if (!ec) acceptor.listen(net::socket_base::max_listen_connections, ec);
    if (ec) {
      throw Error(ErrorCode::Connectivity,
                  "cannot listen on " + host + ":" + std::to_string(port) + ": " + ec.message());
    }
    bound_port = acceptor.local_endpoint().port();
    accept();
    thread = std::thread([this] { ioc.run(); });
  }

  void accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      auto session = std::make_shared<WsSession>(std::move(socket), broker);
      sessions.push_back(session);
      session->start();
      accept();
    });
  }

  void stop() {
    if (stopped) return;
    stopped = true;
    net::post(ioc, [this] {
      beast::error_code ignored;
      acceptor.close(ignored);
      for (auto& w : sessions) {
        if (auto s = w.lock()) s->close();
      }
    });
    work.reset();
    // Give pending closes a moment, then force the loop down.
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    ioc.stop();
    if (thread.joinable()) thread.join();
    for (auto& w : sessions) {
      if (auto s = w.lock()) s->release();
    }
  }

  Broker& broker;
  net::io_context ioc;
  std::optional<net::executor_work_guard<net::io_context::executor_type>> work{ioc.get_executor()};
  tcp::acceptor acceptor;
  std::uint16_t bound_port = 0;
  std::vector<std::weak_ptr<WsSession>> sessions;
  bool stopped = false;
  std::thread thread;
};

WsBridgeServer::WsBridgeServer(Broker& broker, std::uint16_t port, const std::string& host)
    : impl_(std::make_unique<Impl>(broker, port, host)) {}

WsBridgeServer::~WsBridgeServer() { stop(); }

std::uint16_t WsBridgeServer::port() const { return impl_->bound_port; }

void WsBridgeServer::stop() { impl_->stop(); }

}  // namespace puppetry::relay
