#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace puppetry::relay::topics {

std::string puppet_pose(std::string_view session_id);
std::string robot_cmd(std::string_view session_id);
std::string robot_state(std::string_view session_id);
std::string session_ctl(std::string_view session_id);
std::string session_status(std::string_view session_id);

/// Pose streams (puppet/... and robot/...); the only topics subject to fault
/// injection.
bool is_telemetry(std::string_view topic);

/// For "puppet/<id>/pose" returns "robot/<id>/cmd".
std::optional<std::string> mirror_target(std::string_view topic);

}  // namespace puppetry::relay::topics
