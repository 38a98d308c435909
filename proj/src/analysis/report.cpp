#include "puppetry/analysis/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "puppetry/core/error.hpp"

namespace puppetry::analysis {

std::vector<ClipAnalysis> analyze_library(const std::vector<std::pair<std::string, ExpressionClip>>& clips) {
  std::vector<ClipAnalysis> out;
  std::vector<MotionFeatures> features;
  for (const auto& [source, clip] : clips) {
    ClipAnalysis a;
    a.source = source;
    a.clip_id = clip.clip_id;
    a.emotion = clip.emotion;
    a.final = clip.final;
    const SpeedProfile profile = speed_profile(clip);
    a.max_speed = *std::max_element(profile.speed.begin(), profile.speed.end());
    a.mean_speed = std::accumulate(profile.speed.begin(), profile.speed.end(), 0.0) /
                   static_cast<double>(profile.size());
    if (profile.size() >= 3) a.peaks = peak_stats(profile);
    if (a.max_speed > 0.0) a.smooth = sparc(profile);
    a.features = extract_features(clip);
    features.push_back(a.features);
    out.push_back(std::move(a));
  }
  if (out.empty()) return out;
  const SignatureContext ctx = context_for(features);
  for (auto& a : out) {
    for (Emotion e : kAllEmotions) a.signature[index_of(e)] = signature_check(a.features, e, ctx);
  }
  return out;
}

namespace {

// Rounded so the report text is stable across platforms' last-bit noise.
double r6(double v) {
  const double r = std::round(v * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;
}

}  // namespace

std::string to_json(const std::vector<ClipAnalysis>& results) {
  using nlohmann::ordered_json;
  ordered_json clips = ordered_json::array();
  for (const auto& a : results) {
    ordered_json o;
    o["source"] = a.source;
    o["clip_id"] = a.clip_id;
    o["emotion"] = to_string(a.emotion);
    o["final"] = a.final;
    o["speed"] = {{"mean_dps", r6(a.mean_speed)}, {"max_dps", r6(a.max_speed)}};
    if (a.peaks) {
      o["peaks"] = {{"peak_count", a.peaks->peak_count},
                    {"peak_rate_hz", r6(a.peaks->peak_rate_hz)},
                    {"max_accel", r6(a.peaks->max_accel)},
                    {"mean_peak_accel", r6(a.peaks->mean_peak_accel)}};
    } else {
      o["peaks"] = nullptr;
    }
    o["sparc"] = a.smooth ? ordered_json(r6(a.smooth->sparc)) : ordered_json(nullptr);
    const auto& f = a.features;
    o["features"] = {{"tilt_mean_deg", r6(f.tilt_mean_deg)},
                     {"tilt_min_deg", r6(f.tilt_min_deg)},
                     {"pan_oscillations", f.pan_oscillations},
                     {"tilt_oscillations", f.tilt_oscillations},
                     {"dominant_axis", to_string(f.dominant_axis)},
                     {"max_accel", r6(f.max_accel)},
                     {"duration_ms", f.duration_ms}};
    ordered_json sig = ordered_json::object();
    for (Emotion e : kAllEmotions) sig[std::string(to_string(e))] = a.signature[index_of(e)];
    o["signature"] = sig;
    o["signature_own_emotion"] = a.signature[index_of(a.emotion)];
    clips.push_back(o);
  }
  ordered_json root;
  root["clips"] = clips;
  root["notes"] = {
      {"surprise_rule", "max_accel above the 75th percentile of this library; a stand-in for abrupt movement"},
      {"disgust_rule", "no rule; always true"}};
  return root.dump(2) + "\n";
}

std::string to_csv(const std::vector<ClipAnalysis>& results) {
  std::ostringstream out;
  out << "source,clip_id,emotion,final,mean_speed_dps,max_speed_dps,peak_count,peak_rate_hz,max_accel,"
         "mean_peak_accel,sparc,tilt_mean_deg,tilt_min_deg,pan_oscillations,tilt_oscillations,dominant_axis,"
         "duration_ms,signature_own_emotion\n";
  auto num = [](double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, r6(v), std::chars_format::fixed, 6);
    return std::string(buf, ptr);
  };
  for (const auto& a : results) {
    const auto& f = a.features;
    out << a.source << ',' << a.clip_id << ',' << to_string(a.emotion) << ',' << (a.final ? "true" : "false") << ','
        << num(a.mean_speed) << ',' << num(a.max_speed) << ',';
    if (a.peaks) {
      out << a.peaks->peak_count << ',' << num(a.peaks->peak_rate_hz) << ',' << num(a.peaks->max_accel) << ','
          << num(a.peaks->mean_peak_accel) << ',';
    } else {
      out << ",,,,";
    }
    out << (a.smooth ? num(a.smooth->sparc) : "") << ',' << num(f.tilt_mean_deg) << ',' << num(f.tilt_min_deg)
        << ',' << f.pan_oscillations << ',' << f.tilt_oscillations << ',' << to_string(f.dominant_axis) << ','
        << f.duration_ms << ',' << (a.signature[index_of(a.emotion)] ? "true" : "false") << '\n';
  }
  return out.str();
}

}  // namespace puppetry::analysis
