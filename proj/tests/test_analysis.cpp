#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "json.hpp"
#include "puppetry/analysis/motion.hpp"
#include "puppetry/analysis/report.hpp"
#include "puppetry/core/error.hpp"
#include "fixtures.hpp"
#include "support.hpp"

using namespace puppetry;
using namespace puppetry::analysis;
using testing_support::Gen;
using testing_support::make_clip;
using testing_support::sample_grid;
using fixtures::Templates;

namespace {

constexpr double kPi = std::numbers::pi;

ExpressionClip constant_clip() {
  return make_clip(sample_grid(1000, [](double) { return std::pair{-90.0, 0.0}; }));
}

SpeedProfile trapezoid() {
  std::vector<double> v(251, 0.0);
  for (int i = 0; i < 251; ++i) {
    if (i >= 10 && i < 30) v[i] = (i - 10) / 20.0 * 100.0;
    else if (i >= 30 && i < 200) v[i] = 100.0;
    else if (i >= 200 && i < 220) v[i] = (220 - i) / 20.0 * 100.0;
  }
  return SpeedProfile::from_speed(v, 20);
}

SpeedProfile rectified_sine() {
  std::vector<double> v;
  for (int i = 0; i <= 250; ++i) v.push_back(std::abs(std::sin(2.0 * kPi * 2.0 * i * 0.02)));
  return SpeedProfile::from_speed(v, 20);
}

}  // namespace

TEST(Speed, ConstantPoseIsZero) {
  const auto p = speed_profile(constant_clip());
  for (double s : p.speed) EXPECT_EQ(s, 0.0);
}

TEST(Speed, ConstantSlope) {
  const auto clip = make_clip(sample_grid(2000, [](double t) { return std::pair{-100.0 + t * 50.0, 0.0}; }));
  for (double s : speed_profile(clip).speed) EXPECT_NEAR(s, 50.0, 1e-9);
}

TEST(Speed, SinePeakMatchesAnalyticDerivative) {
  const auto clip = make_clip(sample_grid(5000, [](double t) { return std::pair{10.0 * std::sin(2.0 * kPi * t), 0.0}; }));
  const auto p = speed_profile(clip);
  const double peak = *std::max_element(p.speed.begin(), p.speed.end());
  EXPECT_NEAR(peak, 20.0 * kPi, 0.01 * 20.0 * kPi);
}

TEST(Speed, TooShort) {
  try {
    speed_profile(make_clip({{0, {}}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooShort);
  }
}

TEST(Speed, TimeReversalProperty) {
  Gen g(61);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<TrajectorySample> s, r;
    const int n = g.integer(2, 200);
    for (int i = 0; i < n; ++i) s.push_back({static_cast<std::uint32_t>(i * 20), g.pose()});
    for (int i = 0; i < n; ++i) r.push_back({static_cast<std::uint32_t>(i * 20), s[n - 1 - i].pose});
    const auto a = speed_profile(make_clip(s)).speed;
    const auto b = speed_profile(make_clip(r)).speed;
    ASSERT_EQ(a.size(), static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ASSERT_NEAR(a[i], b[n - 1 - i], 1e-9);
  }
}

TEST(Peaks, ConstantSpeedHasNone) {
  const auto s = peak_stats(SpeedProfile::from_speed(std::vector<double>(100, 30.0), 20));
  EXPECT_EQ(s.peak_count, 0u);
  EXPECT_EQ(s.max_accel, 0.0);
}

TEST(Peaks, RectifiedSineHasTwenty) {
  const auto s = peak_stats(rectified_sine());
  EXPECT_EQ(s.peak_count, 20u);
  EXPECT_DOUBLE_EQ(s.peak_rate_hz, 20.0 / 5.0);
}

TEST(Peaks, TrapezoidHasTwo) {
  const auto s = peak_stats(trapezoid());
  EXPECT_EQ(s.peak_count, 2u);
  // Onset of acceleration and onset of deceleration.
  ASSERT_EQ(s.peak_indices.size(), 2u);
  EXPECT_LT(s.peak_indices[0], 30u);
  EXPECT_GE(s.peak_indices[1], 199u);
  EXPECT_LT(s.peak_indices[1], 220u);
}

TEST(Peaks, RefractoryPeriodSuppressesChatter) {
  // Alternating speed every sample: |a| peaks every other sample, 40 ms apart.
  std::vector<double> v;
  for (int i = 0; i < 100; ++i) v.push_back(i % 2 ? 10.0 : 0.0);
  const auto s = peak_stats(SpeedProfile::from_speed(v, 20));
  for (std::size_t k = 1; k < s.peak_indices.size(); ++k) {
    EXPECT_GE((s.peak_indices[k] - s.peak_indices[k - 1]) * 20, 100u);
  }
}

TEST(Peaks, CountInvariantUnderScaling) {
  Gen g(62);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v;
    double x = g.uniform(0.0, 50.0);
    for (int i = 0; i < 120; ++i) {
      x = std::max(0.0, x + g.uniform(-10.0, 10.0));
      v.push_back(x);
    }
    const auto base = peak_stats(SpeedProfile::from_speed(v, 20)).peak_count;
    for (double k : {0.5, 3.0, 10.0, 1000.0}) {
      std::vector<double> w = v;
      for (double& y : w) y *= k;
      ASSERT_EQ(peak_stats(SpeedProfile::from_speed(w, 20)).peak_count, base) << trial << " x" << k;
    }
  }
}

TEST(Sparc, BellMatchesOracleAndFrozenValue) {
  const auto bell = testing_support::bell_speed();
  const double oracle = testing_support::sparc_oracle(bell, 0.02);
  const double got = sparc(SpeedProfile::from_speed(bell, 20)).sparc;
  EXPECT_NEAR(got, oracle, 1e-6);
  EXPECT_NEAR(got, -1.3957537904991486, 1e-6);
}

TEST(Sparc, RippleFamilyIsLessSmoothAndMonotone) {
  const double bell = sparc(SpeedProfile::from_speed(testing_support::bell_speed(), 20)).sparc;
  double previous = bell;
  for (double a : {0.05, 0.1, 0.2, 0.3, 0.4}) {
    const auto v = testing_support::bell_speed(a);
    const double got = sparc(SpeedProfile::from_speed(v, 20)).sparc;
    EXPECT_NEAR(got, testing_support::sparc_oracle(v, 0.02), 1e-6) << a;
    EXPECT_LT(got, bell) << a;
    EXPECT_LE(got, previous) << a;
    previous = got;
  }
}

TEST(Sparc, ScaleInvariant) {
  for (double a : {0.0, 0.2}) {
    auto v = testing_support::bell_speed(a);
    const double base = sparc(SpeedProfile::from_speed(v, 20)).sparc;
    for (double& x : v) x *= 10.0;
    EXPECT_NEAR(sparc(SpeedProfile::from_speed(v, 20)).sparc, base, 1e-9);
  }
}

TEST(Sparc, RandomProfilesMatchOracle) {
  Gen g(63);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v;
    const int n = g.integer(10, 300);
    for (int i = 0; i < n; ++i) v.push_back(g.uniform(0.0, 100.0));
    EXPECT_NEAR(sparc(SpeedProfile::from_speed(v, 20)).sparc, testing_support::sparc_oracle(v, 0.02), 1e-6);
  }
}

TEST(Sparc, NegativeForMovementAndDegenerateForStillness) {
  EXPECT_LT(sparc(rectified_sine()).sparc, 0.0);
  try {
    sparc(speed_profile(constant_clip()));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateClip);
  }
}

TEST(Features, ConstantClip) {
  const auto f = extract_features(constant_clip());
  EXPECT_EQ(f.pan_oscillations, 0u);
  EXPECT_EQ(f.tilt_oscillations, 0u);
  EXPECT_EQ(f.dominant_axis, DominantAxis::None);
}

TEST(Features, TriangleWaveOscillations) {
  // Three periods of a 20 degree triangle wave over 3 s.
  const auto clip = make_clip(sample_grid(3000, [](double t) {
    const double p = t - std::floor(t);
    const double tri = p < 0.25 ? 4 * p : (p < 0.75 ? 2 - 4 * p : 4 * p - 4);
    return std::pair{-90.0 + 20.0 * tri, 0.0};
  }));
  const auto f = extract_features(clip);
  EXPECT_EQ(f.pan_oscillations, 6u);
  EXPECT_EQ(f.tilt_oscillations, 0u);
  EXPECT_EQ(f.dominant_axis, DominantAxis::Pan);
}

TEST(Features, MonotoneTiltDescent) {
  const auto clip = make_clip(sample_grid(2000, [](double t) { return std::pair{-90.0, -20.0 * t}; }));
  const auto f = extract_features(clip);
  EXPECT_DOUBLE_EQ(f.tilt_min_deg, -40.0);
  EXPECT_EQ(f.tilt_oscillations, 0u);
  EXPECT_EQ(f.pan_oscillations, 0u);
}

TEST(Features, SmallTremorIsGated) {
  std::vector<double> pos, vel;
  for (int i = 0; i < 100; ++i) {
    pos.push_back(1.4 * std::sin(i * 0.7));
    vel.push_back(std::cos(i * 0.7));
  }
  EXPECT_EQ(count_oscillations(pos, vel), 0u);
}

TEST(Signature, TemplatesPassOwnRuleAndFailAnother) {
  const Templates t;
  std::vector<MotionFeatures> lib;
  for (const auto& c : t.all()) lib.push_back(extract_features(c));
  const auto ctx = context_for(lib);
  for (std::size_t i = 0; i < lib.size(); ++i) {
    const Emotion own = t.all()[i].emotion;
    EXPECT_TRUE(signature_check(lib[i], own, ctx)) << to_string(own);
    int failed_other = 0;
    for (Emotion e : kAllEmotions) failed_other += e != own && !signature_check(lib[i], e, ctx);
    EXPECT_GE(failed_other, 1) << to_string(own);
  }
}

TEST(Signature, SpecExamples) {
  const SignatureContext ctx;
  const auto happy = extract_features(Templates{}.happiness);
  EXPECT_EQ(happy.tilt_oscillations, 6u);  // two reversals per nod
  EXPECT_TRUE(signature_check(happy, Emotion::Happiness, ctx));
  EXPECT_TRUE(signature_check(extract_features(Templates{}.anger), Emotion::Anger, ctx));

  const auto sad = make_clip(sample_grid(2000, [](double) { return std::pair{-90.0, -25.0}; }));
  const auto f = extract_features(sad);
  EXPECT_DOUBLE_EQ(f.tilt_mean_deg, -25.0);
  EXPECT_TRUE(signature_check(f, Emotion::Sadness, ctx));
  EXPECT_FALSE(signature_check(f, Emotion::Happiness, ctx));
  EXPECT_TRUE(signature_check(f, Emotion::Disgust, ctx));
}

TEST(Signature, PercentileIsLinearlyInterpolated) {
  std::vector<MotionFeatures> lib(5);
  for (int i = 0; i < 5; ++i) lib[i].max_accel = 10.0 * (4 - i);
  EXPECT_DOUBLE_EQ(accel_percentile(lib, 0.75), 30.0);
  EXPECT_DOUBLE_EQ(accel_percentile(lib, 0.6), 24.0);
  EXPECT_THROW(accel_percentile(std::vector<MotionFeatures>{}, 0.5), Error);
}

TEST(Report, PureAndComplete) {
  const Templates t;
  std::vector<std::pair<std::string, ExpressionClip>> lib;
  for (const auto& c : t.all()) lib.emplace_back(std::string(to_string(c.emotion)), c);
  lib.emplace_back("still", constant_clip());
  const auto a = analyze_library(lib);
  const auto b = analyze_library(lib);
  EXPECT_EQ(to_json(a), to_json(b));
  EXPECT_EQ(to_csv(a), to_csv(b));
  ASSERT_EQ(a.size(), lib.size());
  EXPECT_FALSE(a.back().smooth);  // motionless clip has no spectrum
  const auto j = nlohmann::json::parse(to_json(a));
  EXPECT_EQ(j["clips"].size(), lib.size());
  EXPECT_EQ(j["clips"][0]["signature"]["happiness"], true);
}
