#pragma once

#include "puppetry/core/pose.hpp"

namespace puppetry {

// Both axes share one affine tick map: 1024 ticks over a 300 degree span
// centered at zero. Tilt poses only reach the [-90, 90] sub-range of it.
inline constexpr double kTickSpanDeg = 300.0;
inline constexpr double kDegreesPerTick = kTickSpanDeg / ServoTicks::kMax;
inline constexpr double kHalfTickDeg = kDegreesPerTick / 2.0;

/// Single-axis map, degrees -> tick, rounded and clamped to [0, 1023].
int degrees_to_tick(double degrees);

/// Single-axis inverse, tick -> degrees, no clamping.
double tick_to_degrees(int tick);

ServoTicks degrees_to_ticks(const Pose& pose);

/// Tilt values outside the pose range clamp to +/-90 via the Pose constructor.
Pose ticks_to_degrees(const ServoTicks& ticks);

/// Rounds both components to four decimals, the on-disk precision of clips.
Pose canonical(const Pose& pose);

double round_to_4dp(double value);

}  // namespace puppetry
