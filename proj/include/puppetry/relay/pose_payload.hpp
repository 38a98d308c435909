#pragma once

#include <cstdint>
#include <span>

#include "puppetry/core/pose.hpp"
#include "puppetry/relay/frame.hpp"

namespace puppetry::relay {

/// 12-byte pose telemetry record: seq:u32 | t_ms:u32 | pan:u16 | tilt:u16.
struct PosePayload {
  static constexpr std::size_t kSize = 12;

  std::uint32_t seq = 0;
  std::uint32_t t_ms = 0;
  ServoTicks ticks;

  friend bool operator==(const PosePayload&, const PosePayload&) = default;
};

Bytes encode_pose(const PosePayload& p);

/// Throws Error(Protocol) on a wrong length or a tick value above 1023.
PosePayload decode_pose(std::span<const std::uint8_t> bytes);

}  // namespace puppetry::relay
