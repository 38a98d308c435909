#pragma once

#include <cstdint>

namespace puppetry {

inline constexpr double kPanMinDeg = -150.0;
inline constexpr double kPanMaxDeg = 150.0;
inline constexpr double kTiltMinDeg = -90.0;
inline constexpr double kTiltMaxDeg = 90.0;

inline constexpr std::uint32_t kDefaultTimestepMs = 20;
inline constexpr std::uint32_t kMaxClipDurationMs = 5000;

/// One pan/tilt configuration in degrees. Out-of-range components are clamped
/// on construction, so every Pose value is in range.
class Pose {
 public:
  constexpr Pose() = default;
  Pose(double pan_deg, double tilt_deg);

  double pan() const noexcept { return pan_; }
  double tilt() const noexcept { return tilt_; }

  friend bool operator==(const Pose&, const Pose&) = default;

 private:
  double pan_ = 0.0;
  double tilt_ = 0.0;
};

/// Every expression starts with the puppet facing the designer's right.
inline const Pose kCalibrationPose{-90.0, 0.0};

/// Raw servo positions. Each axis is clamped to [0, 1023].
class ServoTicks {
 public:
  static constexpr int kMax = 1023;

  constexpr ServoTicks() = default;
  ServoTicks(int pan, int tilt);

  int pan() const noexcept { return pan_; }
  int tilt() const noexcept { return tilt_; }

  friend bool operator==(const ServoTicks&, const ServoTicks&) = default;

 private:
  int pan_ = 512;
  int tilt_ = 512;
};

}  // namespace puppetry
