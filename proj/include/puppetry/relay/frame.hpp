#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace puppetry::relay {

using Bytes = std::vector<std::uint8_t>;

// Wire layout, all integers big-endian:
//   'P' 'L' | type:u8 | topic_len:u16 | topic | payload_len:u32 | payload
inline constexpr std::uint8_t kMagic0 = 0x50;
inline constexpr std::uint8_t kMagic1 = 0x4C;
inline constexpr std::size_t kHeaderBytes = 5;
inline constexpr std::size_t kMinFrameBytes = 9;
inline constexpr std::size_t kMaxTopicBytes = 0xFFFF;
inline constexpr std::uint32_t kMaxPayloadBytes = 16u << 20;

enum class FrameType : std::uint8_t {
  Publish = 1,
  Subscribe = 2,
  Unsubscribe = 3,
  Ping = 4,
  Pong = 5,
};

struct Frame {
  FrameType type = FrameType::Ping;
  std::string topic;
  Bytes payload;

  friend bool operator==(const Frame&, const Frame&) = default;
};

Frame make_publish(std::string topic, Bytes payload);
Frame make_subscribe(std::string topic);
Frame make_unsubscribe(std::string topic);

/// Throws Error(Encoding) for a topic longer than 65535 bytes or a frame that
/// breaks the per-type topic/payload rules.
Bytes encode_frame(const Frame& frame);

/// Decodes exactly one frame occupying all of `bytes`. Throws Error(Protocol).
Frame decode_frame(std::span<const std::uint8_t> bytes);

/// Incremental decoder for a byte stream carrying back-to-back frames.
class FrameReader {
 public:
  void feed(std::span<const std::uint8_t> chunk);

  /// Next complete frame, or nullopt when more bytes are needed.
  /// Throws Error(Protocol) on a malformed header; the stream is then unusable.
  std::optional<Frame> next();

  std::size_t buffered() const { return buffer_.size() - offset_; }

 private:
  Bytes buffer_;
  std::size_t offset_ = 0;
};

}  // namespace puppetry::relay
