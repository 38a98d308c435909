#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "puppetry/core/emotion.hpp"
#include "puppetry/core/pose.hpp"

namespace puppetry {

struct TrajectorySample {
  std::uint32_t t_ms = 0;
  Pose pose;

  friend bool operator==(const TrajectorySample&, const TrajectorySample&) = default;
};

/// A recorded expression: at most five seconds of pan/tilt samples on a
/// fixed timestep grid, plus who designed it and whether it was accepted.
struct ExpressionClip {
  std::string clip_id;
  Emotion emotion = Emotion::Anger;
  std::string designer_id;
  std::uint32_t iteration = 1;
  std::uint32_t timestep_ms = kDefaultTimestepMs;
  bool final = false;
  std::int64_t recorded_at_ms = 0;  // UTC, milliseconds since the Unix epoch
  std::vector<TrajectorySample> samples;

  std::uint32_t duration_ms() const { return samples.empty() ? 0 : samples.back().t_ms; }

  friend bool operator==(const ExpressionClip&, const ExpressionClip&) = default;
};

/// Throws Error(ClipCorrupt) naming the first violated invariant: non-empty,
/// strictly increasing t on the timestep grid, duration <= 5000 ms,
/// positive iteration and timestep.
void validate(const ExpressionClip& clip);

}  // namespace puppetry
