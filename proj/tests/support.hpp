#pragma once

// Test-only helpers: random generators for domain values and reference
// implementations that share no code with the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "puppetry/core/clip.hpp"
#include "puppetry/core/pose.hpp"

namespace testing_support {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }
  std::string text(std::size_t max_len, std::size_t min_len = 0) {
    std::string s(static_cast<std::size_t>(integer(static_cast<int>(min_len), static_cast<int>(max_len))), '\0');
    for (auto& c : s) c = static_cast<char>(integer(0, 255));
    return s;
  }
  std::vector<std::uint8_t> bytes(std::size_t max_len) {
    std::vector<std::uint8_t> b(static_cast<std::size_t>(integer(0, static_cast<int>(max_len))));
    for (auto& x : b) x = static_cast<std::uint8_t>(integer(0, 255));
    return b;
  }
  puppetry::Pose pose() { return {uniform(-150.0, 150.0), uniform(-90.0, 90.0)}; }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline puppetry::ExpressionClip make_clip(std::vector<puppetry::TrajectorySample> samples,
                                          puppetry::Emotion emotion = puppetry::Emotion::Happiness,
                                          std::uint32_t iteration = 1) {
  puppetry::ExpressionClip c;
  c.clip_id = "clip-" + std::to_string(iteration);
  c.emotion = emotion;
  c.designer_id = "d1";
  c.iteration = iteration;
  c.timestep_ms = 20;
  c.recorded_at_ms = 1700000000123;
  c.samples = std::move(samples);
  return c;
}

/// Samples f(t_seconds) -> (pan, tilt) on the 20 ms grid from 0 to duration.
template <typename F>
std::vector<puppetry::TrajectorySample> sample_grid(std::uint32_t duration_ms, F f, std::uint32_t dt_ms = 20) {
  std::vector<puppetry::TrajectorySample> out;
  for (std::uint32_t t = 0; t <= duration_ms; t += dt_ms) {
    const auto [pan, tilt] = f(t / 1000.0);
    out.push_back({t, puppetry::Pose(pan, tilt)});
  }
  return out;
}

/// Spectral arc length by a direct O(N^2) DFT and an explicit arc-length sum.
/// Zero-pads to the next power of two at least four times the signal length,
/// normalizes by the peak magnitude, and keeps bins from DC up to the last one
/// at or under the cutoff whose magnitude reaches the threshold.
inline double sparc_oracle(const std::vector<double>& speed, double dt_s, double cutoff_hz = 10.0,
                           double threshold = 0.05) {
  std::size_t nfft = 1;
  while (nfft < 4 * speed.size()) nfft *= 2;
  const double fs = 1.0 / dt_s;
  const double df = fs / static_cast<double>(nfft);
  std::vector<double> mag;
  for (std::size_t k = 0; k <= nfft / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t n = 0; n < speed.size(); ++n) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k * n % nfft) / static_cast<double>(nfft);
      acc += speed[n] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    mag.push_back(std::abs(acc));
  }
  const double peak = *std::max_element(mag.begin(), mag.end());
  for (auto& m : mag) m /= peak;
  std::size_t last = 0;
  for (std::size_t k = 0; k < mag.size() && static_cast<double>(k) * df <= cutoff_hz; ++k) {
    if (mag[k] >= threshold) last = k;
  }
  const double range = static_cast<double>(last) * df;
  if (last == 0) return 0.0;
  double arc = 0.0;
  for (std::size_t k = 1; k <= last; ++k) {
    const double dx = df / range;
    const double dy = mag[k] - mag[k - 1];
    arc += std::sqrt(dx * dx + dy * dy);
  }
  return -arc;
}

/// Gaussian bell speed profile, sigma 0.5 s, centered in a 5 s window at 50 Hz.
inline std::vector<double> bell_speed(double ripple = 0.0) {
  std::vector<double> v;
  for (int i = 0; i <= 250; ++i) {
    const double t = i * 0.02;
    const double x = (t - 2.5) / 0.5;
    v.push_back(std::exp(-0.5 * x * x) + ripple * (1.0 - std::cos(2.0 * std::numbers::pi * 4.0 * t)) / 2.0);
  }
  return v;
}

}  // namespace testing_support
