#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "puppetry/core/clip.hpp"
#include "puppetry/core/emotion.hpp"
#include "puppetry/core/pose.hpp"

namespace puppetry::session {

enum class Phase { Idle, Calibrating, Practicing, Recording, Reviewing, EmotionDone, SessionComplete };

inline constexpr std::array<Phase, 7> kAllPhases = {
    Phase::Idle,      Phase::Calibrating, Phase::Practicing,      Phase::Recording,
    Phase::Reviewing, Phase::EmotionDone, Phase::SessionComplete,
};

/// Operator commands, carried as text on session/<id>/ctl.
enum class Command { Calibrate, Practice, Record, Stop, Accept, Redo, Advance, Review };

inline constexpr std::array<Command, 8> kAllCommands = {
    Command::Calibrate, Command::Practice, Command::Record,  Command::Stop,
    Command::Accept,    Command::Redo,     Command::Advance, Command::Review,
};

std::string_view to_string(Phase p);
std::string_view to_string(Command c);
std::optional<Command> parse_command(std::string_view text);

/// True for the (phase, command) pairs the protocol admits. Everything else is
/// rejected with Error(Protocol) and leaves the state untouched.
bool is_listed_transition(Phase phase, Command command);

struct SessionState {
  Phase phase = Phase::Idle;
  std::optional<Emotion> current_emotion;
  std::uint32_t iteration = 1;
  std::uint32_t elapsed_ms = 0;

  friend bool operator==(const SessionState&, const SessionState&) = default;
};

struct SessionPlan {
  std::string session_id = "s1";
  std::string designer_id = "designer";
  std::array<Emotion, 6> emotion_order = kAllEmotions;
  std::uint32_t timestep_ms = kDefaultTimestepMs;

  /// Throws Error(InvalidArgument) unless emotion_order is a permutation of the
  /// six emotions and the timestep is positive.
  void validate() const;
};

/// Parses the JSON plan file format. Missing fields take the defaults above.
SessionPlan parse_plan(std::string_view json_text);

inline constexpr double kCalibrationToleranceDeg = 5.0;

bool within_calibration(const Pose& pose);

/// Side effects requested by a transition, for the driver to carry out.
struct TimedPose {
  std::uint32_t t_ms = 0;
  Pose pose;
};

struct Effects {
  std::optional<TimedPose> calibration_target;  // publish to the robot
  std::optional<ExpressionClip> replay;     // re-publish to the robot
  std::vector<ExpressionClip> persist;      // clips whose final flag is settled
  bool status_changed = false;
};

/// One designer's pass through the six emotions: calibrate, practice, record
/// up to five seconds of the robot's achieved trace, review, then accept or
/// redo. Single owner; not thread-safe.
class SessionEngine {
 public:
  /// UTC milliseconds for recorded_at. Without one, recorded_at is the
  /// recording's start on the telemetry timeline, which keeps clips
  /// reproducible.
  using WallClock = std::function<std::int64_t()>;

  explicit SessionEngine(SessionPlan plan, WallClock clock = {});

  const SessionState& state() const { return state_; }
  const SessionPlan& plan() const { return plan_; }

  /// Throws Error(Protocol) for an unlisted pair or an unmet precondition and
  /// Error(EmptyClip) when stopping a recording that holds no samples.
  Effects handle(Command command);

  /// Live puppet pose, used for the calibration gate and to anchor recordings.
  void on_puppet_pose(std::uint32_t t_ms, const Pose& pose);

  /// Robot achieved pose. While recording, samples from the recording start
  /// onward are appended; reaching 5000 ms stops the recording.
  Effects on_robot_sample(std::uint32_t t_ms, const Pose& pose);

  bool calibration_satisfied() const;
  std::optional<Pose> live_pose() const { return live_pose_; }

  /// The clip under review, if any.
  const std::optional<ExpressionClip>& pending_clip() const { return pending_; }

  /// Every clip whose fate is settled: finals plus superseded redos.
  const std::vector<ExpressionClip>& clips() const { return settled_; }

 private:
  Effects begin_calibration(Emotion emotion);
  Effects finish_recording();
  std::string clip_id(Emotion e, std::uint32_t iteration) const;

  SessionPlan plan_;
  WallClock clock_;
  SessionState state_;
  std::size_t emotion_index_ = 0;

  std::optional<Pose> live_pose_;
  std::optional<std::uint32_t> last_puppet_t_;
  std::optional<std::uint32_t> last_robot_t_;

  std::optional<std::uint32_t> record_start_ms_;
  std::int64_t record_wall_ms_ = 0;
  std::vector<TrajectorySample> recording_;
  std::optional<ExpressionClip> pending_;
  std::vector<ExpressionClip> settled_;
};

/// Status payload published after every transition.
std::string status_json(const SessionState& state, const std::string& session_id, bool calibrated,
                        const std::optional<std::string>& error = std::nullopt);

}  // namespace puppetry::session
