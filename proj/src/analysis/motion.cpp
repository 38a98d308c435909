#include "puppetry/analysis/motion.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numeric>
#include <optional>

#include "puppetry/core/error.hpp"

namespace puppetry::analysis {

SpeedProfile SpeedProfile::from_speed(std::vector<double> speed, std::uint32_t timestep_ms) {
  if (timestep_ms == 0) throw Error(ErrorCode::InvalidArgument, "timestep must be positive");
  for (double v : speed) {
    if (!std::isfinite(v) || v < 0.0) throw Error(ErrorCode::InvalidArgument, "speed values must be finite and >= 0");
  }
  SpeedProfile p;
  p.timestep_ms = timestep_ms;
  p.speed = std::move(speed);
  return p;
}

std::vector<double> differentiate(std::span<const double> x, double dt_s) {
  const std::size_t n = x.size();
  if (n < 2) throw Error(ErrorCode::TooShort, "need at least two samples to differentiate");
  std::vector<double> d(n);
  d.front() = (x[1] - x[0]) / dt_s;
  d.back() = (x[n - 1] - x[n - 2]) / dt_s;
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (x[i + 1] - x[i - 1]) / (2.0 * dt_s);
  return d;
}

SpeedProfile speed_profile(const ExpressionClip& clip) {
  if (clip.samples.size() < 2) throw Error(ErrorCode::TooShort, "speed profile needs at least two samples");
  std::vector<double> pan, tilt;
  pan.reserve(clip.samples.size());
  tilt.reserve(clip.samples.size());
  for (const auto& s : clip.samples) {
    pan.push_back(s.pose.pan());
    tilt.push_back(s.pose.tilt());
  }
  SpeedProfile p;
  p.timestep_ms = clip.timestep_ms;
  p.pan_rate = differentiate(pan, p.dt_s());
  p.tilt_rate = differentiate(tilt, p.dt_s());
  p.speed.resize(pan.size());
  for (std::size_t i = 0; i < pan.size(); ++i) p.speed[i] = std::hypot(p.pan_rate[i], p.tilt_rate[i]);
  return p;
}

PeakStats peak_stats(const SpeedProfile& profile) {
  const std::size_t n = profile.size();
  if (n < 3) throw Error(ErrorCode::TooShort, "peak statistics need at least three samples");
  std::vector<double> mag = differentiate(profile.speed, profile.dt_s());
  for (double& a : mag) a = std::abs(a);

  PeakStats stats;
  stats.max_accel = *std::max_element(mag.begin(), mag.end());
  stats.peak_rate_hz = 0.0;
  if (stats.max_accel == 0.0) return stats;

  // Ties within rounding noise count as equal, so a flat |a| plateau yields a
  // single peak at its leading edge.
  const double eps = 1e-9 * stats.max_accel;
  const double threshold = kPeakRelativeThreshold * stats.max_accel;
  const std::size_t refractory =
      (kPeakRefractoryMs + profile.timestep_ms - 1) / profile.timestep_ms;  // samples
  std::optional<std::size_t> last;
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double left = i == 0 ? 0.0 : mag[i - 1];
    const bool is_peak = mag[i] > left + eps && mag[i] >= mag[i + 1] - eps && mag[i] > threshold;
    if (!is_peak) continue;
    if (last && i - *last < refractory) continue;
    stats.peak_indices.push_back(i);
    sum += mag[i];
    last = i;
  }
  stats.peak_count = stats.peak_indices.size();
  const double duration_s = static_cast<double>(n - 1) * profile.dt_s();
  stats.peak_rate_hz = static_cast<double>(stats.peak_count) / duration_s;
  stats.mean_peak_accel = stats.peak_count ? sum / static_cast<double>(stats.peak_count) : 0.0;
  return stats;
}

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex mu;
  return mu;
}

// |X_k| for k in [0, nfft/2], input zero-padded to nfft.
std::vector<double> magnitude_spectrum(std::span<const double> x, std::size_t nfft) {
  const std::size_t bins = nfft / 2 + 1;
  double* in = fftw_alloc_real(nfft);
  fftw_complex* out = fftw_alloc_complex(bins);
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(nfft), in, out, FFTW_ESTIMATE);
  }
  std::fill(in, in + nfft, 0.0);
  std::copy(x.begin(), x.end(), in);
  fftw_execute(plan);
  std::vector<double> mag(bins);
  for (std::size_t k = 0; k < bins; ++k) mag[k] = std::hypot(out[k][0], out[k][1]);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return mag;
}

}  // namespace

Smoothness sparc(const SpeedProfile& profile, const SparcParams& params) {
  const auto& v = profile.speed;
  if (v.empty() || std::all_of(v.begin(), v.end(), [](double s) { return s == 0.0; })) {
    throw Error(ErrorCode::DegenerateClip, "speed profile is identically zero");
  }
  std::size_t nfft = 1;
  while (nfft < 4 * v.size()) nfft <<= 1;
  std::vector<double> mag = magnitude_spectrum(v, nfft);
  const double peak = *std::max_element(mag.begin(), mag.end());
  for (double& m : mag) m /= peak;

  const double fs = 1000.0 / static_cast<double>(profile.timestep_ms);
  const double df = fs / static_cast<double>(nfft);
  std::size_t last = 0;
  for (std::size_t k = 0; k < mag.size() && static_cast<double>(k) * df <= params.cutoff_hz; ++k) {
    if (mag[k] >= params.amp_threshold) last = k;
  }
  if (last == 0) return {0.0};

  const double range = static_cast<double>(last) * df;
  double length = 0.0;
  for (std::size_t k = 1; k <= last; ++k) {
    const double dw = df / range;
    const double dm = mag[k] - mag[k - 1];
    length += std::sqrt(dw * dw + dm * dm);
  }
  return {-length};
}

std::string_view to_string(DominantAxis axis) {
  switch (axis) {
    case DominantAxis::Pan: return "pan";
    case DominantAxis::Tilt: return "tilt";
    case DominantAxis::None: return "none";
  }
  return "";
}

std::size_t count_oscillations(std::span<const double> position, std::span<const double> velocity,
                               double gate_deg) {
  std::size_t count = 0;
  int direction = 0;
  double pivot = position.empty() ? 0.0 : position.front();
  double extreme = pivot;
  for (std::size_t i = 0; i < velocity.size() && i < position.size(); ++i) {
    const int s = velocity[i] > 0.0 ? 1 : (velocity[i] < 0.0 ? -1 : 0);
    if (s == 0) continue;
    if (direction == 0) {
      direction = s;
      extreme = position[i];
      continue;
    }
    if (s != direction) {
      if (std::abs(extreme - pivot) > gate_deg) ++count;
      pivot = extreme;
      extreme = position[i];
      direction = s;
      continue;
    }
    extreme = direction > 0 ? std::max(extreme, position[i]) : std::min(extreme, position[i]);
  }
  return count;
}

MotionFeatures extract_features(const ExpressionClip& clip) {
  const SpeedProfile profile = speed_profile(clip);
  std::vector<double> pan, tilt;
  for (const auto& s : clip.samples) {
    pan.push_back(s.pose.pan());
    tilt.push_back(s.pose.tilt());
  }
  MotionFeatures f;
  f.tilt_mean_deg = std::accumulate(tilt.begin(), tilt.end(), 0.0) / static_cast<double>(tilt.size());
  f.tilt_min_deg = *std::min_element(tilt.begin(), tilt.end());
  f.pan_oscillations = count_oscillations(pan, profile.pan_rate);
  f.tilt_oscillations = count_oscillations(tilt, profile.tilt_rate);
  if (f.pan_oscillations > f.tilt_oscillations) {
    f.dominant_axis = DominantAxis::Pan;
  } else if (f.tilt_oscillations > f.pan_oscillations) {
    f.dominant_axis = DominantAxis::Tilt;
  }
  const auto accel = differentiate(profile.speed, profile.dt_s());
  for (double a : accel) f.max_accel = std::max(f.max_accel, std::abs(a));
  f.duration_ms = clip.duration_ms();
  return f;
}

double accel_percentile(std::span<const MotionFeatures> library, double q) {
  if (library.empty()) throw Error(ErrorCode::NoData, "empty clip library");
  std::vector<double> v;
  for (const auto& f : library) v.push_back(f.max_accel);
  std::sort(v.begin(), v.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

SignatureContext context_for(std::span<const MotionFeatures> library) {
  return {accel_percentile(library, kSurprisePercentile)};
}

bool signature_check(const MotionFeatures& f, Emotion emotion, const SignatureContext& context) {
  switch (emotion) {
    case Emotion::Happiness: return f.tilt_oscillations >= kMinOscillationsForSignature;
    case Emotion::Anger: return f.pan_oscillations >= kMinOscillationsForSignature;
    case Emotion::Sadness:
    case Emotion::Fear: return f.tilt_mean_deg < kLowTiltMeanDeg;
    case Emotion::Surprise: return f.max_accel > context.surprise_accel_threshold;
    case Emotion::Disgust: return true;
  }
  return false;
}

}  // namespace puppetry::analysis
