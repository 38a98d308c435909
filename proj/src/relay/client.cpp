#include "puppetry/relay/client.hpp"

#include <array>

#include "puppetry/core/error.hpp"

namespace puppetry::relay {

RelayClient::RelayClient(const Endpoint& endpoint) : socket_(connect_tcp(endpoint)) {
  reader_ = std::thread([this] { read_loop(); });
}

RelayClient::~RelayClient() { close(); }

void RelayClient::close() {
  socket_.shutdown();
  if (reader_.joinable()) reader_.join();
  socket_.close();
}

bool RelayClient::connected() const {
  std::lock_guard lock(mu_);
  return open_;
}

void RelayClient::send(const Frame& frame) {
  const Bytes bytes = encode_frame(frame);
  std::lock_guard lock(write_mu_);
  if (!socket_.valid() || !socket_.write_all(bytes)) {
    throw Error(ErrorCode::Connectivity, "relay connection lost");
  }
}

void RelayClient::publish(const std::string& topic, const Bytes& payload) { send(make_publish(topic, payload)); }

void RelayClient::publish_text(const std::string& topic, const std::string& text) {
  send(make_publish(topic, Bytes(text.begin(), text.end())));
}

void RelayClient::subscribe(const std::string& topic) { send(make_subscribe(topic)); }
void RelayClient::unsubscribe(const std::string& topic) { send(make_unsubscribe(topic)); }
void RelayClient::ping() { send(Frame{FrameType::Ping, {}, {}}); }

std::optional<Frame> RelayClient::receive(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [&] { return !inbox_.empty() || !open_; });
  if (!inbox_.empty()) {
    Frame f = std::move(inbox_.front());
    inbox_.pop_front();
    return f;
  }
  if (protocol_error_) throw Error(ErrorCode::Protocol, *protocol_error_);
  return std::nullopt;
}

void RelayClient::read_loop() {
  FrameReader reader;
  std::array<std::uint8_t, 8192> buf{};
  try {
    for (;;) {
      const std::size_t n = socket_.read_some(buf);
      if (n == 0) break;
      reader.feed(std::span(buf.data(), n));
      while (auto frame = reader.next()) {
        std::lock_guard lock(mu_);
        inbox_.push_back(std::move(*frame));
        cv_.notify_all();
      }
    }
  } catch (const Error& e) {
    std::lock_guard lock(mu_);
    protocol_error_ = e.what();
  }
  std::lock_guard lock(mu_);
  open_ = false;
  cv_.notify_all();
}

}  // namespace puppetry::relay
