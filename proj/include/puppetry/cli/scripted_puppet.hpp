#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "puppetry/core/clip.hpp"
#include "puppetry/core/emotion.hpp"
#include "puppetry/core/pose.hpp"

namespace puppetry::relay {
class RelayClient;
}

namespace puppetry::cli {

enum class Waveform { Sine, Triangle, Step, GaussianBell };
enum class Axis { Pan, Tilt };

std::optional<Waveform> parse_waveform(std::string_view name);
std::optional<Axis> parse_axis(std::string_view name);

/// One additive motion component on an axis.
///  sine:          A sin(2 pi f t)
///  triangle:      A-peak triangle wave at f, starting at 0 and rising
///  step:          0 until half the duration, then A (f unused)
///  gaussian-bell: A exp(-(t - T/2)^2 / (2 (T/6)^2)) (f unused)
struct WaveComponent {
  Waveform waveform = Waveform::Sine;
  Axis axis = Axis::Pan;
  double amplitude_deg = 10.0;
  double frequency_hz = 1.0;
};

/// Stand-in for the human puppeteer: a base pose plus summed components.
struct ScriptSpec {
  Pose base = kCalibrationPose;
  std::vector<WaveComponent> components;
  std::uint32_t duration_ms = kMaxClipDurationMs;
  std::uint32_t timestep_ms = kDefaultTimestepMs;

  /// Throws Error(InvalidArgument) when the worst-case excursion leaves the
  /// pose range or the timing is not on the timestep grid.
  void validate() const;
};

/// Samples at t = 0, timestep, ..., duration (inclusive).
std::vector<TrajectorySample> generate(const ScriptSpec& spec);

/// Default synthetic expression per emotion, each starting at the
/// calibration pose.
ScriptSpec default_script(Emotion emotion);

/// Publishes a sample sequence as PosePayload frames on puppet/<id>/pose.
/// Timestamps are start_t_ms + sample t. With `pace`, frames are spaced by
/// wall clock at the sample spacing. Returns the number of frames sent.
struct PlaybackOptions {
  std::string session_id = "s1";
  std::uint32_t start_t_ms = 0;
  std::uint32_t first_seq = 0;
  bool pace = true;
};

std::uint64_t play(relay::RelayClient& client, const std::vector<TrajectorySample>& samples,
                   const PlaybackOptions& options);

}  // namespace puppetry::cli
