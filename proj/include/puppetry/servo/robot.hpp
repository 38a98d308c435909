#pragma once

#include <atomic>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "puppetry/core/clip.hpp"
#include "puppetry/core/pose.hpp"

namespace puppetry::relay {
class RelayClient;
}

namespace puppetry::servo {

struct ServoConfig {
  double max_speed_dps = 360.0;
  std::uint32_t timestep_ms = kDefaultTimestepMs;

  /// Largest per-axis move in ticks over `dt_ms`, rounded to the nearest tick.
  int max_step_ticks(std::uint32_t dt_ms) const;

  /// Throws Error(InvalidArgument) unless max_speed_dps > 0 and timestep > 0.
  void validate() const;
};

struct RobotState {
  ServoTicks current;
  ServoTicks target;
  std::uint32_t last_update_ms = 0;

  friend bool operator==(const RobotState&, const RobotState&) = default;
};

struct TimedTicks {
  std::uint32_t t_ms = 0;
  ServoTicks ticks;

  friend bool operator==(const TimedTicks&, const TimedTicks&) = default;
};

/// Replaces the target; the current position only changes on step().
RobotState command(RobotState state, ServoTicks target);

/// Moves each axis toward the target by at most max_step_ticks(dt_ms) without
/// overshooting. dt_ms == 0 is the identity.
RobotState step(RobotState state, std::uint32_t dt_ms, const ServoConfig& config);

/// Event-driven mirror. Each command first advances the servos along the grid
/// up to the command's timestamp (toward the previous target), reporting the
/// achieved position at every grid point, then adopts the new target. The
/// first command places the robot at the commanded pose.
///
/// A timestamp at or before the last update, or further ahead than
/// `resync_gap_ms`, starts a new timeline: the robot reports its current
/// position at that timestamp without moving.
class RobotSimulator {
 public:
  explicit RobotSimulator(ServoConfig config = {},
                          std::uint32_t resync_gap_ms = std::numeric_limits<std::uint32_t>::max());

  std::vector<TimedTicks> on_command(std::uint32_t t_ms, ServoTicks target);

  const std::optional<RobotState>& state() const { return state_; }
  const ServoConfig& config() const { return config_; }

 private:
  ServoConfig config_;
  std::uint32_t resync_gap_ms_;
  std::optional<RobotState> state_;
};

/// Achieved pose at every timestep from the first to the last command.
/// Commands must be strictly increasing multiples of the timestep
/// (Error(InvalidArgument) otherwise). An empty stream gives an empty trace.
std::vector<TrajectorySample> trace(std::span<const TimedTicks> commands, const ServoConfig& config = {});

/// Network front end: subscribes to robot/<id>/cmd and publishes one
/// robot/<id>/state PosePayload per achieved sample until `stop` is set or the
/// relay connection drops.
struct RobotNodeOptions {
  std::string session_id;
  ServoConfig config;
  std::uint32_t resync_gap_ms = 1000;
};

/// Returns the number of state frames published.
std::uint64_t run_robot_node(relay::RelayClient& client, const RobotNodeOptions& options,
                             const std::atomic<bool>& stop);

}  // namespace puppetry::servo
