#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "puppetry/analysis/motion.hpp"
#include "puppetry/core/clip.hpp"

namespace puppetry::analysis {

struct ClipAnalysis {
  std::string source;  // file path or clip id
  std::string clip_id;
  Emotion emotion = Emotion::Anger;
  bool final = false;
  double mean_speed = 0.0;
  double max_speed = 0.0;
  std::optional<PeakStats> peaks;    // empty when the clip is too short
  std::optional<Smoothness> smooth;  // empty for a motionless clip
  MotionFeatures features;
  std::array<bool, 6> signature{};   // per emotion rule, listing order
};

/// Analyzes every clip; the surprise rule uses this library's percentile.
/// Throws Error(TooShort) if a clip has fewer than two samples.
std::vector<ClipAnalysis> analyze_library(const std::vector<std::pair<std::string, ExpressionClip>>& clips);

std::string to_json(const std::vector<ClipAnalysis>& results);
std::string to_csv(const std::vector<ClipAnalysis>& results);

}  // namespace puppetry::analysis
