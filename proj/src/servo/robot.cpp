#include "puppetry/servo/robot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "puppetry/core/error.hpp"
#include "puppetry/core/quantize.hpp"
#include "puppetry/relay/client.hpp"
#include "puppetry/relay/pose_payload.hpp"
#include "puppetry/relay/topics.hpp"

namespace puppetry::servo {

int ServoConfig::max_step_ticks(std::uint32_t dt_ms) const {
  const double degrees = max_speed_dps * static_cast<double>(dt_ms) / 1000.0;
  return static_cast<int>(std::lround(degrees / kDegreesPerTick));
}

void ServoConfig::validate() const {
  if (!(max_speed_dps > 0.0)) throw Error(ErrorCode::InvalidArgument, "max speed must be positive");
  if (timestep_ms == 0) throw Error(ErrorCode::InvalidArgument, "timestep must be positive");
}

RobotState command(RobotState state, ServoTicks target) {
  state.target = target;
  return state;
}

namespace {

int approach(int current, int target, int max_delta) {
  const int diff = target - current;
  return current + std::clamp(diff, -max_delta, max_delta);
}

}  // namespace

RobotState step(RobotState state, std::uint32_t dt_ms, const ServoConfig& config) {
  if (dt_ms == 0) return state;
  const int max_delta = config.max_step_ticks(dt_ms);
  state.current = ServoTicks{approach(state.current.pan(), state.target.pan(), max_delta),
                             approach(state.current.tilt(), state.target.tilt(), max_delta)};
  state.last_update_ms += dt_ms;
  return state;
}

RobotSimulator::RobotSimulator(ServoConfig config, std::uint32_t resync_gap_ms)
    : config_(config), resync_gap_ms_(resync_gap_ms) {
  config_.validate();
}

std::vector<TimedTicks> RobotSimulator::on_command(std::uint32_t t_ms, ServoTicks target) {
  std::vector<TimedTicks> achieved;
  if (!state_) {
    state_ = RobotState{target, target, t_ms};
    achieved.push_back({t_ms, target});
    return achieved;
  }
  RobotState& s = *state_;
  const bool forward = t_ms > s.last_update_ms && t_ms - s.last_update_ms <= resync_gap_ms_;
  if (!forward) {
    s.last_update_ms = t_ms;
    achieved.push_back({t_ms, s.current});
  } else {
    const std::uint32_t dt = config_.timestep_ms;
    while (s.last_update_ms < t_ms) {
      const std::uint32_t remaining = t_ms - s.last_update_ms;
      s = step(s, std::min(dt, remaining), config_);
      achieved.push_back({s.last_update_ms, s.current});
    }
  }
  s = command(s, target);
  return achieved;
}

std::vector<TrajectorySample> trace(std::span<const TimedTicks> commands, const ServoConfig& config) {
  std::vector<TrajectorySample> out;
  if (commands.empty()) return out;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    if (commands[i].t_ms % config.timestep_ms != 0) {
      throw Error(ErrorCode::InvalidArgument, "command at t=" + std::to_string(commands[i].t_ms) +
                                                  " is not a multiple of the timestep");
    }
    if (i > 0 && commands[i].t_ms <= commands[i - 1].t_ms) {
      throw Error(ErrorCode::InvalidArgument, "command timestamps must be strictly increasing");
    }
  }
  RobotSimulator sim(config);
  for (const auto& c : commands) {
    for (const auto& a : sim.on_command(c.t_ms, c.ticks)) out.push_back({a.t_ms, ticks_to_degrees(a.ticks)});
  }
  return out;
}

std::uint64_t run_robot_node(relay::RelayClient& client, const RobotNodeOptions& options,
                             const std::atomic<bool>& stop) {
  RobotSimulator sim(options.config, options.resync_gap_ms);
  const std::string cmd_topic = relay::topics::robot_cmd(options.session_id);
  const std::string state_topic = relay::topics::robot_state(options.session_id);
  client.subscribe(cmd_topic);
  std::uint32_t seq = 0;
  while (!stop && client.connected()) {
    auto frame = client.receive(std::chrono::milliseconds(50));
    if (!frame || frame->type != relay::FrameType::Publish || frame->topic != cmd_topic) continue;
    relay::PosePayload cmd;
    try {
      cmd = relay::decode_pose(frame->payload);
    } catch (const Error&) {
      continue;  // not a pose; ignore
    }
    for (const auto& a : sim.on_command(cmd.t_ms, cmd.ticks)) {
      client.publish(state_topic, relay::encode_pose({seq++, a.t_ms, a.ticks}));
    }
  }
  return seq;
}

}  // namespace puppetry::servo
