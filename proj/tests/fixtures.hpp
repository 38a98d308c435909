#pragma once

// Scenario fixtures shared by the unit suites and the acceptance runner.

#include <cmath>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

#include "puppetry/session/engine.hpp"
#include "support.hpp"

namespace fixtures {

using namespace puppetry;
using namespace puppetry::session;

// Drives an engine with a virtual telemetry clock shared by puppet and robot.
struct Harness {
  SessionEngine engine{SessionPlan{}};
  std::uint32_t t = 0;

  void puppet(const Pose& p) {
    t += 20;
    engine.on_puppet_pose(t, p);
  }
  Effects robot_for(std::uint32_t duration_ms) {
    // Robot samples covering [start, start + duration] of a recording.
    Effects last;
    const std::uint32_t start = t + 20;
    for (std::uint32_t rel = 0; rel <= duration_ms; rel += 20) {
      last = engine.on_robot_sample(start + rel, Pose(-90.0 + rel / 100.0, 0.0));
      t = start + rel;
      if (engine.state().phase != Phase::Recording) break;
    }
    return last;
  }
  void to(Phase target) {
    auto& e = engine;
    while (e.state().phase != target) {
      switch (e.state().phase) {
        case Phase::Idle: e.handle(Command::Calibrate); break;
        case Phase::Calibrating:
          puppet(kCalibrationPose);
          e.handle(Command::Practice);
          break;
        case Phase::Practicing: e.handle(Command::Record); break;
        case Phase::Recording:
          robot_for(1000);
          e.handle(Command::Stop);
          break;
        case Phase::Reviewing: e.handle(Command::Accept); break;
        case Phase::EmotionDone: e.handle(Command::Advance); break;
        case Phase::SessionComplete: return;
      }
    }
  }
};

// The protocol's transition table, written out independently of the engine.
const std::map<std::pair<Phase, Command>, Phase> kTable = {
    {{Phase::Idle, Command::Calibrate}, Phase::Calibrating},
    {{Phase::Calibrating, Command::Practice}, Phase::Practicing},
    {{Phase::Practicing, Command::Record}, Phase::Recording},
    {{Phase::Recording, Command::Stop}, Phase::Reviewing},
    {{Phase::Reviewing, Command::Accept}, Phase::EmotionDone},
    {{Phase::Reviewing, Command::Redo}, Phase::Practicing},
    {{Phase::Reviewing, Command::Review}, Phase::Reviewing},
    {{Phase::EmotionDone, Command::Advance}, Phase::Calibrating},
    {{Phase::EmotionDone, Command::Calibrate}, Phase::Calibrating},
};

struct Templates {
  static constexpr double kPi = std::numbers::pi;
  ExpressionClip happiness = testing_support::make_clip(testing_support::sample_grid(3000, [](double t) {
    return std::pair{-90.0, 15.0 * std::sin(2.0 * kPi * t)};  // three nods
  }), Emotion::Happiness);
  ExpressionClip anger = testing_support::make_clip(testing_support::sample_grid(3000, [](double t) {
    return std::pair{-90.0 + 20.0 * std::sin(2.0 * kPi * 2.0 * t), 0.0};
  }), Emotion::Anger);
  ExpressionClip sadness = testing_support::make_clip(testing_support::sample_grid(5000, [](double t) {
    return std::pair{-90.0 + 5.0 * t, -50.0 * std::min(1.0, t)};  // slow descent, tilt mean -45
  }), Emotion::Sadness);
  ExpressionClip fear = testing_support::make_clip(testing_support::sample_grid(4000, [](double t) {
    return std::pair{-90.0, -30.0 * std::min(1.0, 2.0 * t)};
  }), Emotion::Fear);
  ExpressionClip surprise = testing_support::make_clip(testing_support::sample_grid(2000, [](double t) {
    return t < 1.0 ? std::pair{-90.0, 0.0} : std::pair{-10.0, 25.0};
  }), Emotion::Surprise);

  std::vector<ExpressionClip> all() const { return {happiness, anger, sadness, fear, surprise}; }
};

}  // namespace fixtures
