#include "puppetry/cli/scripted_puppet.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <thread>

#include "puppetry/core/error.hpp"
#include "puppetry/core/quantize.hpp"
#include "puppetry/relay/client.hpp"
#include "puppetry/relay/pose_payload.hpp"
#include "puppetry/relay/topics.hpp"

namespace puppetry::cli {

std::optional<Waveform> parse_waveform(std::string_view name) {
  if (name == "sine") return Waveform::Sine;
  if (name == "triangle") return Waveform::Triangle;
  if (name == "step") return Waveform::Step;
  if (name == "gaussian-bell") return Waveform::GaussianBell;
  return std::nullopt;
}

std::optional<Axis> parse_axis(std::string_view name) {
  if (name == "pan") return Axis::Pan;
  if (name == "tilt") return Axis::Tilt;
  return std::nullopt;
}

namespace {

double triangle_unit(double cycles) {
  const double p = cycles - std::floor(cycles);
  if (p < 0.25) return 4.0 * p;
  if (p < 0.75) return 2.0 - 4.0 * p;
  return 4.0 * p - 4.0;
}

double evaluate(const WaveComponent& c, double t_s, double duration_s) {
  switch (c.waveform) {
    case Waveform::Sine: return c.amplitude_deg * std::sin(2.0 * std::numbers::pi * c.frequency_hz * t_s);
    case Waveform::Triangle: return c.amplitude_deg * triangle_unit(c.frequency_hz * t_s);
    case Waveform::Step: return t_s >= duration_s / 2.0 ? c.amplitude_deg : 0.0;
    case Waveform::GaussianBell: {
      const double sigma = duration_s / 6.0;
      const double x = t_s - duration_s / 2.0;
      return c.amplitude_deg * std::exp(-x * x / (2.0 * sigma * sigma));
    }
  }
  return 0.0;
}

}  // namespace

void ScriptSpec::validate() const {
  if (timestep_ms == 0 || duration_ms % timestep_ms != 0) {
    throw Error(ErrorCode::InvalidArgument, "duration must be a multiple of a positive timestep");
  }
  double pan_lo = base.pan(), pan_hi = base.pan(), tilt_lo = base.tilt(), tilt_hi = base.tilt();
  for (const auto& c : components) {
    if (!std::isfinite(c.amplitude_deg) || !std::isfinite(c.frequency_hz) || c.frequency_hz < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "waveform parameters must be finite, frequency >= 0");
    }
    const double a = std::abs(c.amplitude_deg);
    const bool one_sided = c.waveform == Waveform::Step || c.waveform == Waveform::GaussianBell;
    const double lo = one_sided ? std::min(0.0, c.amplitude_deg) : -a;
    const double hi = one_sided ? std::max(0.0, c.amplitude_deg) : a;
    (c.axis == Axis::Pan ? pan_lo : tilt_lo) += lo;
    (c.axis == Axis::Pan ? pan_hi : tilt_hi) += hi;
  }
  if (pan_lo < kPanMinDeg || pan_hi > kPanMaxDeg || tilt_lo < kTiltMinDeg || tilt_hi > kTiltMaxDeg) {
    throw Error(ErrorCode::InvalidArgument, "script leaves the pose range");
  }
}

std::vector<TrajectorySample> generate(const ScriptSpec& spec) {
  spec.validate();
  std::vector<TrajectorySample> out;
  const double duration_s = spec.duration_ms / 1000.0;
  for (std::uint32_t t = 0; t <= spec.duration_ms; t += spec.timestep_ms) {
    const double ts = t / 1000.0;
    double pan = spec.base.pan(), tilt = spec.base.tilt();
    for (const auto& c : spec.components) (c.axis == Axis::Pan ? pan : tilt) += evaluate(c, ts, duration_s);
    out.push_back({t, Pose{pan, tilt}});
  }
  return out;
}

ScriptSpec default_script(Emotion emotion) {
  ScriptSpec s;
  using W = Waveform;
  switch (emotion) {
    case Emotion::Happiness:  // glance toward the viewer while nodding
      s.components = {{W::GaussianBell, Axis::Pan, 60.0, 0.0}, {W::Sine, Axis::Tilt, 15.0, 2.0}};
      break;
    case Emotion::Anger:  // head shake
      s.components = {{W::Triangle, Axis::Pan, 20.0, 2.0}};
      break;
    case Emotion::Sadness:  // slow turn with the head lowered
      s.components = {{W::GaussianBell, Axis::Pan, 45.0, 0.0}, {W::GaussianBell, Axis::Tilt, -40.0, 0.0}};
      break;
    case Emotion::Fear:  // cowering with a small tremble
      s.components = {{W::GaussianBell, Axis::Tilt, -35.0, 0.0}, {W::Triangle, Axis::Pan, 1.2, 3.0}};
      break;
    case Emotion::Surprise:  // abrupt jump toward the viewer, head up
      s.components = {{W::Step, Axis::Pan, 80.0, 0.0}, {W::Step, Axis::Tilt, 25.0, 0.0}};
      break;
    case Emotion::Disgust:  // slow turn away
      s.components = {{W::Sine, Axis::Pan, -10.0, 0.5}, {W::GaussianBell, Axis::Tilt, -8.0, 0.0}};
      break;
  }
  return s;
}

std::uint64_t play(relay::RelayClient& client, const std::vector<TrajectorySample>& samples,
                   const PlaybackOptions& options) {
  const std::string topic = relay::topics::puppet_pose(options.session_id);
  const auto start = std::chrono::steady_clock::now();
  std::uint64_t sent = 0;
  for (const auto& s : samples) {
    if (options.pace) std::this_thread::sleep_until(start + std::chrono::milliseconds(s.t_ms));
    const auto seq = static_cast<std::uint32_t>(options.first_seq + sent);
    client.publish(topic, relay::encode_pose({seq, options.start_t_ms + s.t_ms, degrees_to_ticks(s.pose)}));
    ++sent;
  }
  return sent;
}

}  // namespace puppetry::cli
