#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include "puppetry/cli/scripted_puppet.hpp"
#include "puppetry/relay/fault.hpp"
#include "puppetry/servo/robot.hpp"
#include "puppetry/session/engine.hpp"

namespace puppetry::cli {

struct E2eOptions {
  std::filesystem::path out_dir;
  session::SessionPlan plan;
  servo::ServoConfig servo;
  relay::FaultProfile faults;
  std::uint64_t seed = 0;
  bool pace = false;
  /// Record every emotion twice, redoing the first take.
  bool redo_each = false;
  /// Puppet frames held at the calibration pose before practice and record.
  std::uint32_t settle_frames = 50;
  std::map<Emotion, ScriptSpec> scripts;  // falls back to default_script()
  std::chrono::milliseconds stage_timeout{15000};
};

struct E2eResult {
  std::vector<std::filesystem::path> clip_files;
  std::size_t final_clips = 0;
  std::filesystem::path analysis_file;
};

/// Runs relay, robot and session as concurrent tasks on loopback, talking only
/// through the relay, and scripts the operator through a full session.
/// Failures throw Error with the failing stage in the message.
E2eResult run_e2e(const E2eOptions& options);

}  // namespace puppetry::cli
