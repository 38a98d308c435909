#include "puppetry/relay/pose_payload.hpp"

#include "puppetry/core/error.hpp"

namespace puppetry::relay {

Bytes encode_pose(const PosePayload& p) {
  Bytes out;
  out.reserve(PosePayload::kSize);
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(p.seq >> shift));
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(p.t_ms >> shift));
  for (int v : {p.ticks.pan(), p.ticks.tilt()}) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

PosePayload decode_pose(std::span<const std::uint8_t> b) {
  if (b.size() != PosePayload::kSize) {
    throw Error(ErrorCode::Protocol, "pose payload must be 12 bytes, got " + std::to_string(b.size()));
  }
  auto u32 = [&](std::size_t i) {
    return (std::uint32_t{b[i]} << 24) | (std::uint32_t{b[i + 1]} << 16) | (std::uint32_t{b[i + 2]} << 8) |
           std::uint32_t{b[i + 3]};
  };
  auto u16 = [&](std::size_t i) { return (int{b[i]} << 8) | int{b[i + 1]}; };
  const int pan = u16(8);
  const int tilt = u16(10);
  if (pan > ServoTicks::kMax || tilt > ServoTicks::kMax) {
    throw Error(ErrorCode::Protocol, "tick value out of range");
  }
  return {u32(0), u32(4), ServoTicks{pan, tilt}};
}

}  // namespace puppetry::relay
