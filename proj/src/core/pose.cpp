#include "puppetry/core/pose.hpp"

#include <algorithm>
#include <cmath>

#include "puppetry/core/quantize.hpp"

namespace puppetry {

Pose::Pose(double pan_deg, double tilt_deg)
    : pan_(std::clamp(pan_deg, kPanMinDeg, kPanMaxDeg)),
      tilt_(std::clamp(tilt_deg, kTiltMinDeg, kTiltMaxDeg)) {}

ServoTicks::ServoTicks(int pan, int tilt)
    : pan_(std::clamp(pan, 0, kMax)), tilt_(std::clamp(tilt, 0, kMax)) {}

int degrees_to_tick(double degrees) {
  const double raw = (degrees + kTickSpanDeg / 2.0) * ServoTicks::kMax / kTickSpanDeg;
  return std::clamp(static_cast<int>(std::lround(raw)), 0, ServoTicks::kMax);
}

double tick_to_degrees(int tick) {
  return static_cast<double>(tick) * kTickSpanDeg / ServoTicks::kMax - kTickSpanDeg / 2.0;
}

ServoTicks degrees_to_ticks(const Pose& pose) {
  return {degrees_to_tick(pose.pan()), degrees_to_tick(pose.tilt())};
}

Pose ticks_to_degrees(const ServoTicks& ticks) {
  return {tick_to_degrees(ticks.pan()), tick_to_degrees(ticks.tilt())};
}

double round_to_4dp(double value) {
  const double r = std::round(value * 1e4) / 1e4;
  return r == 0.0 ? 0.0 : r;  // no negative zero
}

Pose canonical(const Pose& pose) { return {round_to_4dp(pose.pan()), round_to_4dp(pose.tilt())}; }

}  // namespace puppetry
