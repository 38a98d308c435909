#include <gtest/gtest.h>

#include <filesystem>
#include <map>
#include <set>
#include <thread>

#include "json.hpp"
#include "puppetry/core/error.hpp"
#include "puppetry/core/quantize.hpp"
#include "puppetry/relay/broker.hpp"
#include "puppetry/relay/client.hpp"
#include "puppetry/relay/pose_payload.hpp"
#include "puppetry/relay/server.hpp"
#include "puppetry/relay/topics.hpp"
#include "puppetry/session/engine.hpp"
#include "puppetry/session/runner.hpp"
#include "puppetry/store/clip_store.hpp"
#include "fixtures.hpp"

using namespace puppetry;
using namespace puppetry::session;
using namespace std::chrono_literals;
using fixtures::Harness;
using fixtures::kTable;

TEST(Session, ExhaustiveTransitionTable) {
  int listed = 0, rejected = 0;
  for (Phase p : kAllPhases) {
    for (Command c : kAllCommands) {
      Harness h;
      h.to(p);
      if (p == Phase::Calibrating || p == Phase::Practicing) h.puppet(kCalibrationPose);
      if (p == Phase::Recording) h.robot_for(200);
      const SessionState before = h.engine.state();
      const auto it = kTable.find({p, c});
      EXPECT_EQ(is_listed_transition(p, c), it != kTable.end());
      if (it != kTable.end()) {
        ASSERT_NO_THROW(h.engine.handle(c)) << to_string(p) << " " << to_string(c);
        EXPECT_EQ(h.engine.state().phase, it->second);
        ++listed;
      } else {
        try {
          h.engine.handle(c);
          ADD_FAILURE() << "accepted " << to_string(p) << " + " << to_string(c);
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::Protocol);
        }
        EXPECT_EQ(h.engine.state(), before);
        ++rejected;
      }
    }
  }
  EXPECT_EQ(listed, 9);
  EXPECT_EQ(rejected, 7 * 8 - 9);
}

TEST(Session, CalibrationTolerance) {
  EXPECT_TRUE(within_calibration({-90.0, 0.0}));
  EXPECT_FALSE(within_calibration({-84.0, 0.0}));
  EXPECT_TRUE(within_calibration({-86.0, 4.9}));
  EXPECT_FALSE(within_calibration({-90.0, -5.1}));
}

TEST(Session, PracticeNeedsCalibratedPuppet) {
  Harness h;
  h.to(Phase::Calibrating);
  h.puppet({-84.0, 0.0});
  EXPECT_THROW(h.engine.handle(Command::Practice), Error);
  EXPECT_EQ(h.engine.state().phase, Phase::Calibrating);
  h.puppet({-86.0, 4.9});
  EXPECT_NO_THROW(h.engine.handle(Command::Practice));
}

TEST(Session, CalibrateEmitsRobotTarget) {
  Harness h;
  const auto fx = h.engine.handle(Command::Calibrate);
  ASSERT_TRUE(fx.calibration_target);
  EXPECT_EQ(fx.calibration_target->pose, kCalibrationPose);
  EXPECT_EQ(h.engine.state().current_emotion, Emotion::Anger);
}

TEST(Session, RecordingCapsAtFiveSeconds) {
  Harness h;
  h.to(Phase::Recording);
  const auto fx = h.robot_for(5200);
  EXPECT_EQ(h.engine.state().phase, Phase::Reviewing);
  ASSERT_TRUE(h.engine.pending_clip());
  EXPECT_EQ(h.engine.pending_clip()->duration_ms(), 5000u);
  EXPECT_EQ(h.engine.pending_clip()->samples.size(), 251u);
  EXPECT_TRUE(fx.replay);  // entering review replays the take
}

TEST(Session, StopAfterThreeSeconds) {
  Harness h;
  h.to(Phase::Recording);
  h.robot_for(3000);
  h.engine.handle(Command::Stop);
  const auto& clip = *h.engine.pending_clip();
  EXPECT_EQ(clip.duration_ms(), 3000u);
  EXPECT_EQ(clip.samples.size(), 151u);
  EXPECT_EQ(clip.samples.front().t_ms, 0u);
}

TEST(Session, StopWithoutSamplesIsEmptyClip) {
  Harness h;
  h.to(Phase::Recording);
  const auto before = h.engine.state();
  try {
    h.engine.handle(Command::Stop);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyClip);
  }
  EXPECT_EQ(h.engine.state(), before);
}

TEST(Session, SamplesBeforeRecordStartAreIgnored) {
  Harness h;
  h.to(Phase::Practicing);
  h.puppet(kCalibrationPose);
  const std::uint32_t t_record = h.t;
  h.engine.handle(Command::Record);
  h.engine.on_robot_sample(t_record, kCalibrationPose);  // still the practice stream
  EXPECT_THROW(h.engine.handle(Command::Stop), Error);
  h.engine.on_robot_sample(t_record + 20, Pose(-80.0, 1.0));
  h.engine.handle(Command::Stop);
  ASSERT_EQ(h.engine.pending_clip()->samples.size(), 1u);
  EXPECT_EQ(h.engine.pending_clip()->samples[0], (TrajectorySample{0, Pose(-80.0, 1.0)}));
}

TEST(Session, ReviewReplaysPendingClip) {
  Harness h;
  h.to(Phase::Reviewing);
  const auto fx = h.engine.handle(Command::Review);
  ASSERT_TRUE(fx.replay);
  EXPECT_EQ(*fx.replay, *h.engine.pending_clip());
}

TEST(Session, AcceptMarksFinal) {
  Harness h;
  h.to(Phase::Reviewing);
  const auto fx = h.engine.handle(Command::Accept);
  EXPECT_EQ(h.engine.state().phase, Phase::EmotionDone);
  ASSERT_EQ(fx.persist.size(), 1u);
  EXPECT_TRUE(fx.persist[0].final);
}

TEST(Session, RedoKeepsPriorClip) {
  Harness h;
  h.to(Phase::Reviewing);
  const auto fx = h.engine.handle(Command::Redo);
  EXPECT_EQ(h.engine.state().phase, Phase::Practicing);
  EXPECT_EQ(h.engine.state().iteration, 2u);
  ASSERT_EQ(fx.persist.size(), 1u);
  EXPECT_FALSE(fx.persist[0].final);
  EXPECT_EQ(fx.persist[0].iteration, 1u);
  ASSERT_EQ(h.engine.clips().size(), 1u);
}

TEST(Session, AdvanceMovesToNextEmotion) {
  Harness h;
  h.to(Phase::Reviewing);
  h.engine.handle(Command::Redo);
  h.to(Phase::EmotionDone);
  h.engine.handle(Command::Advance);
  EXPECT_EQ(h.engine.state().current_emotion, h.engine.plan().emotion_order[1]);
  EXPECT_EQ(h.engine.state().iteration, 1u);
}

TEST(Session, FullSessionWithOneRedoEach) {
  SessionPlan plan;
  plan.emotion_order = {Emotion::Surprise, Emotion::Fear, Emotion::Anger,
                        Emotion::Sadness,  Emotion::Disgust, Emotion::Happiness};
  Harness h;
  h.engine = SessionEngine(plan);
  std::size_t persisted = 0;
  for (int e = 0; e < 6; ++e) {
    h.to(Phase::Reviewing);
    persisted += h.engine.handle(Command::Redo).persist.size();
    h.to(Phase::Reviewing);
    persisted += h.engine.handle(Command::Accept).persist.size();
    if (e < 5) h.engine.handle(Command::Advance);
  }
  h.engine.handle(Command::Advance);
  EXPECT_EQ(h.engine.state().phase, Phase::SessionComplete);
  EXPECT_EQ(persisted, 12u);
  const auto& clips = h.engine.clips();
  ASSERT_EQ(clips.size(), 12u);
  std::multiset<Emotion> finals;
  for (const auto& c : clips) {
    EXPECT_NO_THROW(validate(c));
    if (c.final) finals.insert(c.emotion);
  }
  EXPECT_EQ(finals.size(), 6u);
  for (Emotion e : kAllEmotions) EXPECT_EQ(finals.count(e), 1u);
}

TEST(Session, CalibrateFromLastEmotionDoneIsRejected) {
  Harness h;
  for (int e = 0; e < 6; ++e) {
    h.to(Phase::EmotionDone);
    if (e < 5) h.engine.handle(Command::Advance);
  }
  const auto before = h.engine.state();
  EXPECT_THROW(h.engine.handle(Command::Calibrate), Error);
  EXPECT_EQ(h.engine.state(), before);
}

TEST(Session, PlanParsing) {
  const auto plan = parse_plan(R"({"session_id":"x","emotion_order":["fear","anger","disgust","happiness","sadness","surprise"]})");
  EXPECT_EQ(plan.session_id, "x");
  EXPECT_EQ(plan.designer_id, "designer");
  EXPECT_EQ(plan.emotion_order[0], Emotion::Fear);
  EXPECT_THROW(parse_plan(R"({"emotion_order":["fear","fear","disgust","happiness","sadness","surprise"]})"), Error);
  EXPECT_THROW(parse_plan("{"), Error);
}

TEST(Session, StatusJson) {
  const auto j = nlohmann::json::parse(status_json({Phase::Recording, Emotion::Fear, 2, 340}, "s1", true));
  EXPECT_EQ(j["phase"], "Recording");
  EXPECT_EQ(j["emotion"], "fear");
  EXPECT_EQ(j["iteration"], 2);
  EXPECT_EQ(j["elapsed_ms"], 340);
  EXPECT_FALSE(j.contains("error"));
}

TEST(Runner, ReplayIsReproducible) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "puppetry_runner_replay";
  fs::remove_all(dir);
  fs::create_directories(dir);

  relay::Broker broker;
  relay::TcpRelayServer server(broker, 0);
  const relay::Endpoint ep{"127.0.0.1", server.port()};
  relay::RelayClient session_client(ep), op(ep), robot(ep);
  robot.subscribe(relay::topics::robot_cmd("s1"));
  op.subscribe(relay::topics::session_status("s1"));
  for (auto* c : {&robot, &op}) {
    c->ping();
    ASSERT_TRUE(c->receive(2000ms));
  }
  RunnerOptions ro;
  ro.out_dir = dir;
  ro.pace = false;
  std::atomic<bool> stop{false};
  std::thread runner([&] { run_session(session_client, ro, stop); });

  auto await = [&](std::string_view phase) {
    for (;;) {
      auto f = op.receive(3000ms);
      if (!f) return false;
      if (nlohmann::json::parse(f->payload.begin(), f->payload.end())["phase"] == phase) return true;
    }
  };
  auto ctl = [&](std::string_view cmd) { op.publish_text(relay::topics::session_ctl("s1"), std::string(cmd)); };
  auto cmd_payloads = [&](std::size_t n) {
    std::vector<relay::Bytes> out;
    while (out.size() < n) {
      auto f = robot.receive(3000ms);
      if (!f) break;
      out.push_back(f->payload);
    }
    return out;
  };

  ASSERT_TRUE(await("Idle"));
  ctl("calibrate");
  ASSERT_TRUE(await("Calibrating"));
  cmd_payloads(1);  // calibration target
  op.publish(relay::topics::puppet_pose("s1"), relay::encode_pose({0, 20, degrees_to_ticks(kCalibrationPose)}));
  cmd_payloads(1);  // mirrored puppet pose
  ctl("practice");
  ASSERT_TRUE(await("Practicing"));
  ctl("record");
  ASSERT_TRUE(await("Recording"));
  // Stand in for the robot: report a 1 s take directly on the state topic.
  for (std::uint32_t rel = 0; rel <= 1000; rel += 20) {
    robot.publish(relay::topics::robot_state("s1"),
                  relay::encode_pose({rel, 40 + rel, ServoTicks(200 + static_cast<int>(rel / 20), 512)}));
  }
  robot.ping();
  ASSERT_TRUE(robot.receive(2000ms));  // the pong; states were handled before it
  ctl("stop");
  ASSERT_TRUE(await("Reviewing"));
  const auto first = cmd_payloads(51);
  ctl("review");
  const auto second = cmd_payloads(51);
  ASSERT_EQ(first.size(), 51u);
  EXPECT_EQ(first, second);
  for (std::size_t i = 0; i < first.size(); ++i) {
    const auto p = relay::decode_pose(first[i]);
    EXPECT_EQ(p.t_ms, i * 20);
    EXPECT_EQ(p.ticks, ServoTicks(200 + static_cast<int>(i), 512));
  }
  ctl("accept");
  ASSERT_TRUE(await("EmotionDone"));
  stop = true;
  runner.join();
  const auto catalog = store::scan(dir);
  ASSERT_EQ(catalog.entries.size(), 1u);
  EXPECT_TRUE(catalog.entries[0].final);
  EXPECT_EQ(catalog.entries[0].sample_count, 51u);
  fs::remove_all(dir);
}
