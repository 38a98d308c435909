#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "puppetry/analysis/report.hpp"
#include "puppetry/cli/e2e.hpp"
#include "puppetry/cli/scripted_puppet.hpp"
#include "puppetry/core/error.hpp"
#include "puppetry/recognition/ratings.hpp"
#include "puppetry/relay/broker.hpp"
#include "puppetry/relay/client.hpp"
#include "puppetry/relay/server.hpp"
#include "puppetry/relay/topics.hpp"
#include "puppetry/servo/robot.hpp"
#include "puppetry/session/runner.hpp"
#include "puppetry/store/clip_store.hpp"

namespace fs = std::filesystem;
using namespace puppetry;

namespace {

enum Exit { kOk = 0, kUsage = 1, kConnectivity = 2, kProtocol = 3, kData = 4 };

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return kUsage;
    case ErrorCode::Connectivity: return kConnectivity;
    case ErrorCode::Protocol:
    case ErrorCode::Encoding: return kProtocol;
    default: return kData;
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::DataError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// SIGINT/SIGTERM are blocked in every thread and collected by one waiter.
class StopSignal {
 public:
  StopSignal() {
    sigemptyset(&set_);
    sigaddset(&set_, SIGINT);
    sigaddset(&set_, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set_, nullptr);
  }
  /// Sets `flag` from a detached waiter thread when a signal arrives.
  void watch(std::atomic<bool>& flag) {
    std::thread([this, &flag] {
      int sig = 0;
      sigwait(&set_, &sig);
      flag = true;
    }).detach();
  }
  void wait() {
    int sig = 0;
    sigwait(&set_, &sig);
  }

 private:
  sigset_t set_;
};

struct FaultFlags {
  std::uint32_t latency_ms = 0;
  std::uint32_t jitter_ms = 0;
  double drop_prob = 0.0;
  std::uint64_t seed = 0;

  void add_to(CLI::App& app) {
    app.add_option("--latency-ms", latency_ms, "Base delivery delay for telemetry topics");
    app.add_option("--jitter-ms", jitter_ms, "Uniform +/- jitter added to the delay");
    app.add_option("--drop-prob", drop_prob, "Telemetry drop probability")->check(CLI::Range(0.0, 1.0));
    app.add_option("--seed", seed, "Fault RNG seed");
  }
  relay::FaultProfile profile() const { return {latency_ms, jitter_ms, drop_prob}; }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robot puppeteering toolkit: relay, simulated robot, sessions, analysis"};
  app.require_subcommand(1);
  StopSignal signals;

  std::string relay_addr = "127.0.0.1:7447";
  auto add_relay = [&](CLI::App* sub) { sub->add_option("--relay", relay_addr, "Relay address host:port"); };

  // relay
  auto* relay_cmd = app.add_subcommand("relay", "Run the pub/sub relay (TCP plus websocket bridge)");
  std::string host = "127.0.0.1";
  std::uint16_t port = 7447, ws_port = 7448;
  FaultFlags relay_faults;
  relay_cmd->add_option("--host", host, "Listen address");
  relay_cmd->add_option("--port", port, "TCP port");
  relay_cmd->add_option("--ws-port", ws_port, "Websocket bridge port");
  relay_faults.add_to(*relay_cmd);
  add_relay(relay_cmd);

  // simulate-robot
  auto* robot_cmd = app.add_subcommand("simulate-robot", "Mirror robot/<id>/cmd onto a simulated pan/tilt robot");
  std::string session_id = "s1";
  servo::ServoConfig servo_config;
  robot_cmd->add_option("--session", session_id, "Session id");
  robot_cmd->add_option("--max-speed-dps", servo_config.max_speed_dps, "Servo rate limit in deg/s");
  robot_cmd->add_option("--timestep-ms", servo_config.timestep_ms, "Servo update interval");
  add_relay(robot_cmd);

  // puppet-play
  auto* play_cmd = app.add_subcommand("puppet-play", "Publish a scripted puppet stream");
  std::string clip_source, waveform = "sine", axis = "pan", emotion_script;
  cli::WaveComponent component;
  std::uint32_t duration_ms = kMaxClipDurationMs;
  std::uint32_t start_t_ms = 0;
  bool no_pace = false;
  play_cmd->add_option("--session", session_id, "Session id");
  play_cmd->add_option("--clip", clip_source, "Replay a stored clip file");
  play_cmd->add_option("--emotion", emotion_script, "Use the built-in script for an emotion");
  play_cmd->add_option("--waveform", waveform, "sine | triangle | step | gaussian-bell");
  play_cmd->add_option("--axis", axis, "pan | tilt");
  play_cmd->add_option("--amplitude-deg", component.amplitude_deg, "Waveform amplitude");
  play_cmd->add_option("--frequency-hz", component.frequency_hz, "Waveform frequency");
  play_cmd->add_option("--duration-ms", duration_ms, "Script length");
  play_cmd->add_option("--start-t-ms", start_t_ms, "Timestamp of the first frame");
  play_cmd->add_flag("--no-pace", no_pace, "Publish as fast as possible");
  add_relay(play_cmd);

  // session run
  auto* session_cmd = app.add_subcommand("session", "Session engine");
  session_cmd->require_subcommand(1);
  auto* session_run = session_cmd->add_subcommand("run", "Drive one designer session over the relay");
  std::string plan_file, out_dir;
  bool overwrite = false;
  session_run->add_option("--plan", plan_file, "Session plan JSON")->check(CLI::ExistingFile);
  session_run->add_option("--out", out_dir, "Clip output directory")->required();
  session_run->add_flag("--no-pace", no_pace, "Replay without wall-clock pacing");
  session_run->add_flag("--overwrite", overwrite, "Replace existing clip files");
  add_relay(session_run);

  // ctl
  auto* ctl_cmd = app.add_subcommand("ctl", "Send one operator command and print the resulting status");
  std::string ctl_text;
  ctl_cmd->add_option("command", ctl_text, "calibrate | practice | record | stop | accept | redo | advance | review")
      ->required();
  ctl_cmd->add_option("--session", session_id, "Session id");
  add_relay(ctl_cmd);

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "Motion metrics and signature checks for clips");
  std::string analyze_path;
  bool as_json = false, as_csv = false;
  analyze_cmd->add_option("path", analyze_path, "Clip file or directory")->required();
  analyze_cmd->add_flag("--json", as_json, "JSON output (default)");
  analyze_cmd->add_flag("--csv", as_csv, "CSV output");
  add_relay(analyze_cmd);

  // ratings report
  auto* ratings_cmd = app.add_subcommand("ratings", "Recognition survey aggregation");
  ratings_cmd->require_subcommand(1);
  auto* ratings_report = ratings_cmd->add_subcommand("report", "Per-clip recognizability");
  std::string ratings_file, intents_file;
  bool with_confusion = false;
  ratings_report->add_option("--ratings", ratings_file, "rater_id,clip_id,word,rating CSV")->required();
  ratings_report->add_option("--intents", intents_file, "clip_id,emotion CSV")->required();
  ratings_report->add_flag("--confusion", with_confusion, "Include the confusion matrix");
  ratings_report->add_flag("--csv", as_csv, "CSV output instead of JSON");
  add_relay(ratings_report);

  // clips
  auto* clips_cmd = app.add_subcommand("clips", "Clip library tools");
  clips_cmd->require_subcommand(1);
  auto* clips_scan = clips_cmd->add_subcommand("scan", "Catalog a clip directory");
  std::string clips_path;
  clips_scan->add_option("dir", clips_path, "Directory")->required();
  add_relay(clips_scan);
  auto* clips_export = clips_cmd->add_subcommand("export-csv", "Write a clip as CSV to stdout");
  clips_export->add_option("file", clips_path, "Clip file")->required();
  add_relay(clips_export);

  // e2e
  auto* e2e_cmd = app.add_subcommand("e2e", "Relay, robot and session on loopback with scripted puppet input");
  FaultFlags e2e_faults;
  bool redo_each = false;
  e2e_cmd->add_option("--out", out_dir, "Output directory (must be empty)")->required();
  e2e_cmd->add_option("--plan", plan_file, "Session plan JSON")->check(CLI::ExistingFile);
  e2e_cmd->add_flag("--no-pace", no_pace, "Virtual time: no wall-clock pacing");
  e2e_cmd->add_flag("--redo", redo_each, "Record each emotion twice, redoing the first take");
  e2e_cmd->add_option("--max-speed-dps", servo_config.max_speed_dps, "Servo rate limit in deg/s");
  e2e_faults.add_to(*e2e_cmd);
  add_relay(e2e_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*relay_cmd) {
      relay::Broker::Options bo;
      bo.faults = relay_faults.profile();
      bo.seed = relay_faults.seed;
      bo.faults.validate();
      relay::Broker broker(bo);
      relay::TcpRelayServer tcp(broker, port, host);
      relay::WsBridgeServer ws(broker, ws_port, host);
      std::cerr << "relay listening on " << host << ":" << tcp.port() << " (ws " << ws.port() << ")\n";
      signals.wait();
      ws.stop();
      tcp.stop();
    } else if (*robot_cmd) {
      servo_config.validate();
      relay::RelayClient client(relay::Endpoint::parse(relay_addr));
      std::atomic<bool> stop{false};
      signals.watch(stop);
      const auto n = servo::run_robot_node(client, {session_id, servo_config, 1000}, stop);
      std::cerr << "published " << n << " state frames\n";
    } else if (*play_cmd) {
      std::vector<TrajectorySample> samples;
      if (!clip_source.empty()) {
        samples = store::load(clip_source).samples;
      } else if (!emotion_script.empty()) {
        const auto e = parse_emotion(emotion_script);
        if (!e) throw Error(ErrorCode::InvalidArgument, "unknown emotion " + emotion_script);
        samples = cli::generate(cli::default_script(*e));
      } else {
        const auto w = cli::parse_waveform(waveform);
        const auto a = cli::parse_axis(axis);
        if (!w) throw Error(ErrorCode::InvalidArgument, "unknown waveform " + waveform);
        if (!a) throw Error(ErrorCode::InvalidArgument, "unknown axis " + axis);
        component.waveform = *w;
        component.axis = *a;
        cli::ScriptSpec spec;
        spec.components = {component};
        spec.duration_ms = duration_ms;
        samples = cli::generate(spec);
      }
      relay::RelayClient client(relay::Endpoint::parse(relay_addr));
      const auto n = cli::play(client, samples, {session_id, start_t_ms, 0, !no_pace});
      std::cout << n << "\n";
    } else if (*session_run) {
      session::RunnerOptions ro;
      if (!plan_file.empty()) ro.plan = session::parse_plan(read_file(plan_file));
      ro.plan.validate();
      ro.out_dir = out_dir;
      ro.pace = !no_pace;
      ro.overwrite = overwrite;
      ro.clock = [] {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::system_clock::now().time_since_epoch())
            .count();
      };
      fs::create_directories(ro.out_dir);
      relay::RelayClient client(relay::Endpoint::parse(relay_addr));
      std::atomic<bool> stop{false};
      signals.watch(stop);
      const auto final_state = session::run_session(client, ro, stop);
      std::cerr << "session ended in phase " << session::to_string(final_state.phase) << "\n";
      if (final_state.phase != session::Phase::SessionComplete && !stop) return kConnectivity;
    } else if (*ctl_cmd) {
      if (!session::parse_command(ctl_text)) throw Error(ErrorCode::InvalidArgument, "unknown command " + ctl_text);
      relay::RelayClient client(relay::Endpoint::parse(relay_addr));
      client.subscribe(relay::topics::session_status(session_id));
      client.ping();
      while (auto f = client.receive(std::chrono::milliseconds(2000))) {
        if (f->type == relay::FrameType::Pong) break;
      }
      client.publish_text(relay::topics::session_ctl(session_id), ctl_text);
      auto status = client.receive(std::chrono::milliseconds(2000));
      if (!status) throw Error(ErrorCode::Connectivity, "no status from session " + session_id);
      const std::string text(status->payload.begin(), status->payload.end());
      std::cout << text << "\n";
      if (text.find("\"error\"") != std::string::npos) return kProtocol;
    } else if (*analyze_cmd) {
      std::vector<std::pair<std::string, ExpressionClip>> clips;
      if (fs::is_directory(analyze_path)) {
        const auto catalog = store::scan(analyze_path);
        for (const auto& w : catalog.warnings) std::cerr << "skipped " << w.path << ": " << w.reason << "\n";
        for (const auto& e : catalog.entries) clips.emplace_back(e.path.string(), store::load(e.path));
      } else {
        clips.emplace_back(analyze_path, store::load(analyze_path));
      }
      const auto results = analysis::analyze_library(clips);
      std::cout << (as_csv ? analysis::to_csv(results) : analysis::to_json(results));
    } else if (*ratings_report) {
      const auto ingested = recognition::ingest(read_file(ratings_file));
      for (const auto& r : ingested.rejected) std::cerr << "line " << r.line << ": " << r.reason << "\n";
      const auto intents = recognition::parse_intents(read_file(intents_file));
      const auto result = recognition::report(ingested.records, intents);
      std::optional<recognition::ConfusionMatrix> matrix;
      if (with_confusion) matrix = recognition::confusion(ingested.records, intents);
      if (as_csv) {
        std::cout << recognition::to_csv(result);
        if (matrix) std::cout << "\n" << recognition::to_csv(*matrix);
      } else {
        std::cout << recognition::to_json(result, matrix ? &*matrix : nullptr);
      }
    } else if (*clips_scan) {
      const auto catalog = store::scan(clips_path);
      std::cout << "path,clip_id,emotion,designer_id,iteration,final,timestep_ms,recorded_at,duration_ms,sample_count\n";
      for (const auto& e : catalog.entries) {
        std::cout << e.path.filename().string() << ',' << e.clip_id << ',' << to_string(e.emotion) << ','
                  << e.designer_id << ',' << e.iteration << ',' << (e.final ? "true" : "false") << ','
                  << e.timestep_ms << ',' << store::format_utc(e.recorded_at_ms) << ',' << e.duration_ms << ','
                  << e.sample_count << "\n";
      }
      for (const auto& w : catalog.warnings) std::cerr << "unreadable " << w.path << ": " << w.reason << "\n";
    } else if (*clips_export) {
      std::cout << store::export_csv(store::load(clips_path));
    } else if (*e2e_cmd) {
      cli::E2eOptions eo;
      if (!plan_file.empty()) eo.plan = session::parse_plan(read_file(plan_file));
      eo.out_dir = out_dir;
      eo.seed = e2e_faults.seed;
      eo.faults = e2e_faults.profile();
      eo.faults.validate();
      eo.servo = servo_config;
      eo.servo.timestep_ms = eo.plan.timestep_ms;
      eo.pace = !no_pace;
      eo.redo_each = redo_each;
      const auto result = cli::run_e2e(eo);
      std::cout << result.clip_files.size() << " clips (" << result.final_clips << " final), analysis "
                << result.analysis_file.string() << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
  return kOk;
}
