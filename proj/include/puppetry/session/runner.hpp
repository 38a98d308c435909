#pragma once

#include <atomic>
#include <filesystem>

#include "puppetry/session/engine.hpp"

namespace puppetry::relay {
class RelayClient;
}

namespace puppetry::session {

struct RunnerOptions {
  SessionPlan plan;
  std::filesystem::path out_dir;
  /// Replays wait one timestep between frames; off for virtual-time runs.
  bool pace = true;
  bool overwrite = false;
  /// Leave empty for reproducible recorded_at stamps.
  SessionEngine::WallClock clock;
};

/// Drives a SessionEngine from relay traffic: ctl commands, puppet poses and
/// robot states in, calibration/replay commands, status and clip files out.
/// Returns once the session completes, `stop` is set, or the relay drops.
SessionState run_session(relay::RelayClient& client, const RunnerOptions& options, const std::atomic<bool>& stop);

}  // namespace puppetry::session
