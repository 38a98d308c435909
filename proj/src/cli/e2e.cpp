#include "puppetry/cli/e2e.hpp"

#include <exception>
#include <fstream>
#include <thread>

#include "json.hpp"

#include "puppetry/analysis/report.hpp"
#include "puppetry/core/error.hpp"
#include "puppetry/relay/broker.hpp"
#include "puppetry/relay/client.hpp"
#include "puppetry/relay/server.hpp"
#include "puppetry/relay/topics.hpp"
#include "puppetry/session/runner.hpp"
#include "puppetry/store/clip_store.hpp"

namespace puppetry::cli {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void fail(const std::string& stage, const std::string& what) {
  throw Error(ErrorCode::DataError, "[" + stage + "] " + what);
}

// A background task whose exception is kept for the orchestrator.
class Task {
 public:
  template <typename F>
  explicit Task(F&& body)
      : thread_([this, body = std::forward<F>(body)]() mutable {
          try {
            body();
          } catch (...) {
            error_ = std::current_exception();
          }
        }) {}
  ~Task() { join(); }
  void join() {
    if (thread_.joinable()) thread_.join();
  }
  std::exception_ptr error() const { return error_; }

 private:
  std::exception_ptr error_;
  std::thread thread_;
};

// Waits for the relay to answer a ping. The relay handles one connection's
// frames in order, so every earlier subscribe has taken effect by then. Only
// used before any traffic flows, so nothing else is discarded.
void sync(relay::RelayClient& client, const std::string& who) {
  client.ping();
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(5);
  while (std::chrono::steady_clock::now() < deadline) {
    auto frame = client.receive(std::chrono::milliseconds(50));
    if (frame && frame->type == relay::FrameType::Pong) return;
  }
  fail(who, "relay did not answer ping");
}

// The human side: the puppet stream and operator commands share one relay
// connection, so the session observes them in publication order.
class Operator {
 public:
  Operator(const relay::Endpoint& ep, const E2eOptions& options)
      : client_(ep), options_(options), id_(options.plan.session_id) {
    client_.subscribe(relay::topics::session_status(id_));
    sync(client_, "puppet");
  }

  void command(session::Command c, session::Phase expect) {
    client_.publish_text(relay::topics::session_ctl(id_), std::string(session::to_string(c)));
    await(expect, std::string(session::to_string(c)));
  }

  void await(session::Phase expect, const std::string& what) {
    const auto deadline = std::chrono::steady_clock::now() + options_.stage_timeout;
    while (std::chrono::steady_clock::now() < deadline) {
      auto frame = client_.receive(std::chrono::milliseconds(50));
      if (!frame) {
        if (!client_.connected()) fail("session", "relay connection lost waiting for " + what);
        continue;
      }
      const auto status = nlohmann::json::parse(frame->payload.begin(), frame->payload.end());
      if (status.contains("error")) fail("session", what + ": " + status["error"].get<std::string>());
      if (status.value("phase", "") == session::to_string(expect)) return;
    }
    fail("session", "timed out waiting for " + std::string(session::to_string(expect)) + " after " + what);
  }

  void hold_calibration() {
    std::vector<TrajectorySample> hold;
    for (std::uint32_t i = 0; i < options_.settle_frames; ++i) {
      hold.push_back({i * options_.plan.timestep_ms, kCalibrationPose});
    }
    stream(hold);
  }

  void stream(const std::vector<TrajectorySample>& samples) {
    if (samples.empty()) return;
    PlaybackOptions po{id_, clock_ms_, seq_, options_.pace};
    seq_ += static_cast<std::uint32_t>(play(client_, samples, po));
    clock_ms_ += samples.back().t_ms + options_.plan.timestep_ms;
  }

 private:
  relay::RelayClient client_;
  const E2eOptions& options_;
  std::string id_;
  std::uint32_t clock_ms_ = 0;  // puppet telemetry timeline, never rewinds
  std::uint32_t seq_ = 0;
};

void record_take(Operator& op, const std::vector<TrajectorySample>& script) {
  using session::Command;
  using session::Phase;
  op.hold_calibration();
  op.command(Command::Record, Phase::Recording);
  op.stream(script);
  // Keep the robot reporting past the end of the take. A full-length take then
  // stops on the first sample beyond the limit even if the one at exactly five
  // seconds was dropped; a short take ends with the hold and a manual stop.
  op.hold_calibration();
  if (script.back().t_ms < kMaxClipDurationMs) {
    op.command(Command::Stop, Phase::Reviewing);
  } else {
    op.await(Phase::Reviewing, "recording auto-stop");
  }
}

}  // namespace

E2eResult run_e2e(const E2eOptions& options) {
  using session::Command;
  using session::Phase;
  options.plan.validate();
  if (fs::exists(options.out_dir) && !fs::is_empty(options.out_dir)) {
    fail("setup", "output directory " + options.out_dir.string() + " is not empty");
  }
  fs::create_directories(options.out_dir);

  relay::Broker::Options bo;
  bo.faults = options.faults;
  bo.seed = options.seed;
  relay::Broker broker(bo);
  std::optional<relay::TcpRelayServer> server;
  try {
    server.emplace(broker, 0);
  } catch (const Error& e) {
    fail("relay", e.what());
  }
  const relay::Endpoint ep{"127.0.0.1", server->port()};

  std::atomic<bool> stop{false};
  // Connect in a fixed order so per-connection fault streams are reproducible.
  std::optional<relay::RelayClient> robot_client, session_client;
  std::optional<Operator> op;
  const auto& id = options.plan.session_id;
  try {
    robot_client.emplace(ep);
    session_client.emplace(ep);
    op.emplace(ep, options);
  } catch (const Error& e) {
    fail("relay", e.what());
  }
  // Subscriptions are in place before any task runs, so no early frame is lost.
  robot_client->subscribe(relay::topics::robot_cmd(id));
  sync(*robot_client, "robot");
  for (const auto& topic : {relay::topics::session_ctl(id), relay::topics::puppet_pose(id), relay::topics::robot_state(id)}) {
    session_client->subscribe(topic);
  }
  sync(*session_client, "session");

  servo::RobotNodeOptions ro{options.plan.session_id, options.servo, 1000};
  session::RunnerOptions so{options.plan, options.out_dir, options.pace, false, {}};

  E2eResult result;
  {
    Task robot([&] { servo::run_robot_node(*robot_client, ro, stop); });
    Task sess([&] { session::run_session(*session_client, so, stop); });
    auto shutdown = [&] {
      stop = true;
      robot.join();
      sess.join();
    };
    try {
      op->await(Phase::Idle, "session start");
      for (std::size_t i = 0; i < options.plan.emotion_order.size(); ++i) {
        const Emotion emotion = options.plan.emotion_order[i];
        const auto it = options.scripts.find(emotion);
        const auto script = generate(it != options.scripts.end() ? it->second : default_script(emotion));

        op->command(i == 0 ? Command::Calibrate : Command::Advance, Phase::Calibrating);
        op->hold_calibration();
        op->command(Command::Practice, Phase::Practicing);
        op->stream(script);
        record_take(*op, script);
        if (options.redo_each) {
          op->command(Command::Redo, Phase::Practicing);
          record_take(*op, script);
        }
        op->command(Command::Accept, Phase::EmotionDone);
      }
      op->command(Command::Advance, Phase::SessionComplete);
    } catch (const Error& e) {
      shutdown();
      if (e.code() == ErrorCode::DataError) throw;
      fail("puppet", e.what());
    }
    shutdown();
    if (auto err = robot.error()) {
      try {
        std::rethrow_exception(err);
      } catch (const std::exception& e) {
        fail("robot", e.what());
      }
    }
    if (auto err = sess.error()) {
      try {
        std::rethrow_exception(err);
      } catch (const std::exception& e) {
        fail("session", e.what());
      }
    }
  }
  op.reset();
  robot_client.reset();
  session_client.reset();
  server->stop();

  std::vector<std::pair<std::string, ExpressionClip>> clips;
  const auto catalog = store::scan(options.out_dir);
  if (!catalog.warnings.empty()) fail("analysis", catalog.warnings.front().reason);
  for (const auto& entry : catalog.entries) {
    result.clip_files.push_back(entry.path);
    if (entry.final) ++result.final_clips;
    clips.emplace_back(entry.path.filename().string(), store::load(entry.path));
  }
  try {
    const auto report = analysis::analyze_library(clips);
    result.analysis_file = options.out_dir / "analysis.json";
    std::ofstream(result.analysis_file, std::ios::binary) << analysis::to_json(report);
  } catch (const Error& e) {
    fail("analysis", e.what());
  }
  return result;
}

}  // namespace puppetry::cli
