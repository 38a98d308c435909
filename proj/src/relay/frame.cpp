#include "puppetry/relay/frame.hpp"

#include "puppetry/core/error.hpp"

namespace puppetry::relay {
namespace {

void put_u16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_u32(Bytes& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

std::uint16_t get_u16(const std::uint8_t* p) { return static_cast<std::uint16_t>((p[0] << 8) | p[1]); }

std::uint32_t get_u32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) |
         std::uint32_t{p[3]};
}

bool known_type(std::uint8_t t) { return t >= 1 && t <= 5; }

bool needs_topic(FrameType t) {
  return t == FrameType::Publish || t == FrameType::Subscribe || t == FrameType::Unsubscribe;
}

// Shared by encode (Encoding error) and decode (Protocol error).
const char* rule_violation(const Frame& f) {
  if (needs_topic(f.type) && f.topic.empty()) return "topic must be non-empty";
  if (f.type != FrameType::Publish && !f.payload.empty()) return "only PUBLISH may carry a payload";
  return nullptr;
}

// Parses a header at p (at least kHeaderBytes available). Returns the total
// frame length when enough bytes are present to know it, else 0.
std::size_t frame_length(const std::uint8_t* p, std::size_t available) {
  if (p[0] != kMagic0 || p[1] != kMagic1) throw Error(ErrorCode::Protocol, "bad magic");
  if (!known_type(p[2])) {
    throw Error(ErrorCode::Protocol, "unknown frame type " + std::to_string(p[2]));
  }
  const std::size_t topic_len = get_u16(p + 3);
  const std::size_t len_at = kHeaderBytes + topic_len;
  if (available < len_at + 4) return 0;
  const std::uint32_t payload_len = get_u32(p + len_at);
  if (payload_len > kMaxPayloadBytes) {
    throw Error(ErrorCode::Protocol, "payload length " + std::to_string(payload_len) + " exceeds limit");
  }
  return len_at + 4 + payload_len;
}

Frame parse_complete(const std::uint8_t* p, std::size_t total) {
  Frame f;
  f.type = static_cast<FrameType>(p[2]);
  const std::size_t topic_len = get_u16(p + 3);
  f.topic.assign(reinterpret_cast<const char*>(p + kHeaderBytes), topic_len);
  const std::size_t payload_at = kHeaderBytes + topic_len + 4;
  f.payload.assign(p + payload_at, p + total);
  if (const char* why = rule_violation(f)) throw Error(ErrorCode::Protocol, why);
  return f;
}

}  // namespace

Frame make_publish(std::string topic, Bytes payload) {
  return {FrameType::Publish, std::move(topic), std::move(payload)};
}
Frame make_subscribe(std::string topic) { return {FrameType::Subscribe, std::move(topic), {}}; }
Frame make_unsubscribe(std::string topic) { return {FrameType::Unsubscribe, std::move(topic), {}}; }

Bytes encode_frame(const Frame& frame) {
  if (frame.topic.size() > kMaxTopicBytes) {
    throw Error(ErrorCode::Encoding, "topic of " + std::to_string(frame.topic.size()) + " bytes exceeds 65535");
  }
  if (frame.payload.size() > kMaxPayloadBytes) throw Error(ErrorCode::Encoding, "payload too large");
  if (!known_type(static_cast<std::uint8_t>(frame.type))) throw Error(ErrorCode::Encoding, "unknown frame type");
  if (const char* why = rule_violation(frame)) throw Error(ErrorCode::Encoding, why);

  Bytes out;
  out.reserve(kMinFrameBytes + frame.topic.size() + frame.payload.size());
  out.push_back(kMagic0);
  out.push_back(kMagic1);
  out.push_back(static_cast<std::uint8_t>(frame.type));
  put_u16(out, static_cast<std::uint16_t>(frame.topic.size()));
  out.insert(out.end(), frame.topic.begin(), frame.topic.end());
  put_u32(out, static_cast<std::uint32_t>(frame.payload.size()));
  out.insert(out.end(), frame.payload.begin(), frame.payload.end());
  return out;
}

Frame decode_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMinFrameBytes) throw Error(ErrorCode::Protocol, "truncated frame");
  const std::size_t total = frame_length(bytes.data(), bytes.size());
  if (total == 0 || total > bytes.size()) throw Error(ErrorCode::Protocol, "truncated frame");
  if (total < bytes.size()) throw Error(ErrorCode::Protocol, "trailing bytes after frame");
  return parse_complete(bytes.data(), total);
}

void FrameReader::feed(std::span<const std::uint8_t> chunk) {
  if (offset_ > 0 && offset_ == buffer_.size()) {
    buffer_.clear();
    offset_ = 0;
  }
  buffer_.insert(buffer_.end(), chunk.begin(), chunk.end());
}

std::optional<Frame> FrameReader::next() {
  const std::size_t available = buffer_.size() - offset_;
  if (available < kHeaderBytes) return std::nullopt;
  const std::uint8_t* p = buffer_.data() + offset_;
  const std::size_t total = frame_length(p, available);
  if (total == 0 || total > available) return std::nullopt;
  Frame f = parse_complete(p, total);
  offset_ += total;
  if (offset_ > 4096 && offset_ * 2 > buffer_.size()) {
    buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(offset_));
    offset_ = 0;
  }
  return f;
}

}  // namespace puppetry::relay
