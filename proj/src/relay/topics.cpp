#include "puppetry/relay/topics.hpp"

namespace puppetry::relay::topics {
namespace {

constexpr std::string_view kPuppetPrefix = "puppet/";
constexpr std::string_view kPoseSuffix = "/pose";

std::string join(std::string_view a, std::string_view id, std::string_view b) {
  std::string s;
  s.reserve(a.size() + id.size() + b.size() + 2);
  s.append(a).append("/").append(id).append("/").append(b);
  return s;
}

}  // namespace

std::string puppet_pose(std::string_view id) { return join("puppet", id, "pose"); }
std::string robot_cmd(std::string_view id) { return join("robot", id, "cmd"); }
std::string robot_state(std::string_view id) { return join("robot", id, "state"); }
std::string session_ctl(std::string_view id) { return join("session", id, "ctl"); }
std::string session_status(std::string_view id) { return join("session", id, "status"); }

bool is_telemetry(std::string_view topic) {
  return topic.starts_with(kPuppetPrefix) || topic.starts_with("robot/");
}

std::optional<std::string> mirror_target(std::string_view topic) {
  if (!topic.starts_with(kPuppetPrefix) || !topic.ends_with(kPoseSuffix)) return std::nullopt;
  const auto id = topic.substr(kPuppetPrefix.size(), topic.size() - kPuppetPrefix.size() - kPoseSuffix.size());
  if (id.empty() || id.find('/') != std::string_view::npos) return std::nullopt;
  return robot_cmd(id);
}

}  // namespace puppetry::relay::topics
