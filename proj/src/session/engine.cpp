#include "puppetry/session/engine.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "json.hpp"

#include "puppetry/core/error.hpp"
#include "puppetry/core/quantize.hpp"

namespace puppetry::session {

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::Idle: return "Idle";
    case Phase::Calibrating: return "Calibrating";
    case Phase::Practicing: return "Practicing";
    case Phase::Recording: return "Recording";
    case Phase::Reviewing: return "Reviewing";
    case Phase::EmotionDone: return "EmotionDone";
    case Phase::SessionComplete: return "SessionComplete";
  }
  return "";
}

std::string_view to_string(Command c) {
  switch (c) {
    case Command::Calibrate: return "calibrate";
    case Command::Practice: return "practice";
    case Command::Record: return "record";
    case Command::Stop: return "stop";
    case Command::Accept: return "accept";
    case Command::Redo: return "redo";
    case Command::Advance: return "advance";
    case Command::Review: return "review";
  }
  return "";
}

std::optional<Command> parse_command(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  for (Command c : kAllCommands) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

bool is_listed_transition(Phase phase, Command command) {
  switch (phase) {
    case Phase::Idle: return command == Command::Calibrate;
    case Phase::Calibrating: return command == Command::Practice;
    case Phase::Practicing: return command == Command::Record;
    case Phase::Recording: return command == Command::Stop;
    case Phase::Reviewing:
      return command == Command::Accept || command == Command::Redo || command == Command::Review;
    case Phase::EmotionDone: return command == Command::Advance || command == Command::Calibrate;
    case Phase::SessionComplete: return false;
  }
  return false;
}

void SessionPlan::validate() const {
  if (timestep_ms == 0) throw Error(ErrorCode::InvalidArgument, "timestep must be positive");
  std::array<int, 6> seen{};
  for (Emotion e : emotion_order) ++seen[index_of(e)];
  if (std::any_of(seen.begin(), seen.end(), [](int n) { return n != 1; })) {
    throw Error(ErrorCode::InvalidArgument, "emotion order must list each of the six emotions exactly once");
  }
  if (session_id.empty() || designer_id.empty()) {
    throw Error(ErrorCode::InvalidArgument, "session and designer ids must be non-empty");
  }
}

SessionPlan parse_plan(std::string_view json_text) {
  SessionPlan plan;
  try {
    const auto j = nlohmann::json::parse(json_text);
    plan.session_id = j.value("session_id", plan.session_id);
    plan.designer_id = j.value("designer_id", plan.designer_id);
    plan.timestep_ms = j.value("timestep_ms", plan.timestep_ms);
    if (j.contains("emotion_order")) {
      const auto& order = j.at("emotion_order");
      if (!order.is_array() || order.size() != 6) {
        throw Error(ErrorCode::InvalidArgument, "emotion_order must list six emotions");
      }
      for (std::size_t i = 0; i < 6; ++i) {
        auto e = parse_emotion(order[i].get<std::string>());
        if (!e) throw Error(ErrorCode::InvalidArgument, "unknown emotion " + order[i].dump());
        plan.emotion_order[i] = *e;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad plan: ") + e.what());
  }
  plan.validate();
  return plan;
}

bool within_calibration(const Pose& pose) {
  return std::abs(pose.pan() - kCalibrationPose.pan()) <= kCalibrationToleranceDeg &&
         std::abs(pose.tilt() - kCalibrationPose.tilt()) <= kCalibrationToleranceDeg;
}

SessionEngine::SessionEngine(SessionPlan plan, WallClock clock) : plan_(std::move(plan)), clock_(std::move(clock)) {
  plan_.validate();
}

bool SessionEngine::calibration_satisfied() const { return live_pose_ && within_calibration(*live_pose_); }

std::string SessionEngine::clip_id(Emotion e, std::uint32_t iteration) const {
  return plan_.session_id + "-" + plan_.designer_id + "-" + std::string(to_string(e)) + "-" +
         std::to_string(iteration);
}

Effects SessionEngine::begin_calibration(Emotion emotion) {
  state_.phase = Phase::Calibrating;
  state_.current_emotion = emotion;
  state_.iteration = 1;
  state_.elapsed_ms = 0;
  const std::uint32_t anchor = last_puppet_t_ ? *last_puppet_t_ : last_robot_t_.value_or(0);
  Effects fx;
  fx.calibration_target = TimedPose{anchor + plan_.timestep_ms, kCalibrationPose};
  fx.status_changed = true;
  return fx;
}

Effects SessionEngine::handle(Command command) {
  auto reject = [&](const std::string& why) {
    throw Error(ErrorCode::Protocol, std::string(to_string(command)) + " rejected in " +
                                         std::string(to_string(state_.phase)) + ": " + why);
  };
  if (!is_listed_transition(state_.phase, command)) reject("not a valid transition");

  Effects fx;
  switch (command) {
    case Command::Calibrate:
      if (state_.phase == Phase::Idle) {
        emotion_index_ = 0;
        return begin_calibration(plan_.emotion_order[0]);
      }
      // From EmotionDone: calibrate for the next emotion.
      if (emotion_index_ + 1 >= plan_.emotion_order.size()) reject("no emotion left to calibrate");
      ++emotion_index_;
      return begin_calibration(plan_.emotion_order[emotion_index_]);

    case Command::Practice:
      if (!calibration_satisfied()) reject("puppet is not within 5 degrees of the calibration pose");
      state_.phase = Phase::Practicing;
      fx.status_changed = true;
      return fx;

    case Command::Record: {
      if (!calibration_satisfied()) reject("puppet is not within 5 degrees of the calibration pose");
      const std::uint32_t anchor = last_puppet_t_ ? *last_puppet_t_ : last_robot_t_.value_or(0);
      record_start_ms_ = anchor + plan_.timestep_ms;
      record_wall_ms_ = clock_ ? clock_() : static_cast<std::int64_t>(*record_start_ms_);
      recording_.clear();
      state_.phase = Phase::Recording;
      state_.elapsed_ms = 0;
      fx.status_changed = true;
      return fx;
    }

    case Command::Stop:
      if (recording_.empty()) throw Error(ErrorCode::EmptyClip, "recording holds no samples");
      return finish_recording();

    case Command::Review:
      fx.replay = pending_;
      if (!fx.replay) reject("no clip to review");
      return fx;

    case Command::Accept:
    case Command::Redo: {
      if (!pending_) reject("no clip to review");
      ExpressionClip clip = std::move(*pending_);
      pending_.reset();
      clip.final = command == Command::Accept;
      settled_.push_back(clip);
      fx.persist.push_back(std::move(clip));
      if (command == Command::Accept) {
        state_.phase = Phase::EmotionDone;
      } else {
        state_.phase = Phase::Practicing;
        ++state_.iteration;
      }
      state_.elapsed_ms = 0;
      fx.status_changed = true;
      return fx;
    }

    case Command::Advance:
      if (emotion_index_ + 1 >= plan_.emotion_order.size()) {
        state_ = SessionState{Phase::SessionComplete, std::nullopt, state_.iteration, 0};
        fx.status_changed = true;
        return fx;
      }
      ++emotion_index_;
      return begin_calibration(plan_.emotion_order[emotion_index_]);
  }
  reject("unhandled command");
  return fx;
}

void SessionEngine::on_puppet_pose(std::uint32_t t_ms, const Pose& pose) {
  live_pose_ = pose;
  last_puppet_t_ = t_ms;
}

Effects SessionEngine::on_robot_sample(std::uint32_t t_ms, const Pose& pose) {
  last_robot_t_ = t_ms;
  if (state_.phase != Phase::Recording || !record_start_ms_ || t_ms < *record_start_ms_) return {};
  const std::uint32_t rel = t_ms - *record_start_ms_;
  if (rel % plan_.timestep_ms != 0) return {};
  if (!recording_.empty() && rel <= recording_.back().t_ms) return {};
  if (rel > kMaxClipDurationMs) {
    // Grid point at 5000 ms never arrived; the limit has passed regardless.
    return recording_.empty() ? Effects{} : finish_recording();
  }
  recording_.push_back({rel, canonical(pose)});
  state_.elapsed_ms = rel;
  if (rel == kMaxClipDurationMs) return finish_recording();
  return {};
}

Effects SessionEngine::finish_recording() {
  ExpressionClip clip;
  const Emotion emotion = *state_.current_emotion;
  clip.clip_id = clip_id(emotion, state_.iteration);
  clip.emotion = emotion;
  clip.designer_id = plan_.designer_id;
  clip.iteration = state_.iteration;
  clip.timestep_ms = plan_.timestep_ms;
  clip.recorded_at_ms = record_wall_ms_;
  clip.samples = std::move(recording_);
  recording_.clear();
  record_start_ms_.reset();
  validate(clip);

  pending_ = clip;
  state_.phase = Phase::Reviewing;
  Effects fx;
  fx.replay = std::move(clip);
  fx.status_changed = true;
  return fx;
}

std::string status_json(const SessionState& state, const std::string& session_id, bool calibrated,
                        const std::optional<std::string>& error) {
  nlohmann::ordered_json j;
  j["session_id"] = session_id;
  j["phase"] = to_string(state.phase);
  j["emotion"] = state.current_emotion ? nlohmann::ordered_json(std::string(to_string(*state.current_emotion)))
                                       : nlohmann::ordered_json(nullptr);
  j["iteration"] = state.iteration;
  j["elapsed_ms"] = state.elapsed_ms;
  j["calibrated"] = calibrated;
  if (error) j["error"] = *error;
  return j.dump();
}

}  // namespace puppetry::session
