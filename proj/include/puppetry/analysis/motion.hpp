#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "puppetry/core/clip.hpp"
#include "puppetry/core/emotion.hpp"

namespace puppetry::analysis {

/// Per-axis angular rates and combined speed (deg/s), one value per sample:
/// central differences inside, one-sided differences at the two ends.
struct SpeedProfile {
  std::uint32_t timestep_ms = kDefaultTimestepMs;
  std::vector<double> pan_rate;
  std::vector<double> tilt_rate;
  std::vector<double> speed;

  double dt_s() const { return static_cast<double>(timestep_ms) / 1000.0; }
  std::size_t size() const { return speed.size(); }

  /// Profile with only a combined speed series (per-axis rates left empty).
  /// Throws Error(InvalidArgument) for a negative or non-finite value.
  static SpeedProfile from_speed(std::vector<double> speed, std::uint32_t timestep_ms);
};

/// Same finite-difference scheme used throughout: central inside, one-sided
/// at the ends. Requires at least two values.
std::vector<double> differentiate(std::span<const double> values, double dt_s);

/// Throws Error(TooShort) for fewer than two samples.
SpeedProfile speed_profile(const ExpressionClip& clip);

struct PeakStats {
  std::size_t peak_count = 0;
  double peak_rate_hz = 0.0;
  double max_accel = 0.0;        // deg/s^2, max |acceleration|
  double mean_peak_accel = 0.0;  // deg/s^2, mean |acceleration| over peaks
  std::vector<std::size_t> peak_indices;
};

inline constexpr double kPeakRelativeThreshold = 0.10;
inline constexpr std::uint32_t kPeakRefractoryMs = 100;

/// Acceleration is the derivative of the combined speed. A peak is a sample
/// whose |acceleration| rises above the previous sample (zero before the
/// first), is not exceeded by the next one, is above 10% of the global
/// maximum, and lies at least 100 ms after the previous accepted peak. The
/// last sample has no successor and never qualifies.
/// Throws Error(TooShort) for fewer than three samples.
PeakStats peak_stats(const SpeedProfile& profile);

struct SparcParams {
  double cutoff_hz = 10.0;
  double amp_threshold = 0.05;
};

struct Smoothness {
  double sparc = 0.0;
};

/// Spectral arc length of the combined speed. The spectrum is zero-padded to
/// the next power of two >= 4x the profile length and normalized by its peak
/// magnitude; bins above cutoff_hz, and those beyond the last bin whose
/// normalized magnitude reaches amp_threshold, are discarded.
/// Throws Error(DegenerateClip) when the speed is identically zero.
Smoothness sparc(const SpeedProfile& profile, const SparcParams& params = {});

enum class DominantAxis { Pan, Tilt, None };
std::string_view to_string(DominantAxis axis);

inline constexpr double kOscillationGateDeg = 3.0;

struct MotionFeatures {
  double tilt_mean_deg = 0.0;
  double tilt_min_deg = 0.0;
  std::size_t pan_oscillations = 0;
  std::size_t tilt_oscillations = 0;
  DominantAxis dominant_axis = DominantAxis::None;
  double max_accel = 0.0;
  std::uint32_t duration_ms = 0;
};

/// Velocity sign reversals whose swing since the previous reversal (or the
/// start) exceeds `gate_deg`. Zero velocities keep the previous direction.
std::size_t count_oscillations(std::span<const double> position, std::span<const double> velocity,
                               double gate_deg = kOscillationGateDeg);

/// Throws Error(TooShort) for fewer than two samples.
MotionFeatures extract_features(const ExpressionClip& clip);

inline constexpr std::size_t kMinOscillationsForSignature = 2;
inline constexpr double kLowTiltMeanDeg = -10.0;
inline constexpr double kSurprisePercentile = 0.75;

/// Library-dependent inputs to the signature rules.
struct SignatureContext {
  /// Surprise needs max_accel strictly above this. Infinity disables the rule.
  double surprise_accel_threshold = std::numeric_limits<double>::infinity();
};

/// Linear-interpolated percentile (q in [0,1]) of max_accel over a library.
double accel_percentile(std::span<const MotionFeatures> library, double q = kSurprisePercentile);

SignatureContext context_for(std::span<const MotionFeatures> library);

/// happiness: tilt nodding; anger: pan shaking; sadness and fear: lowered
/// tilt; surprise: acceleration in the library's top quartile; disgust: no
/// rule, always true.
bool signature_check(const MotionFeatures& features, Emotion emotion, const SignatureContext& context);

}  // namespace puppetry::analysis
