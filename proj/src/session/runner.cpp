#include "puppetry/session/runner.hpp"

#include <string>
#include <thread>

#include "puppetry/core/error.hpp"
#include "puppetry/core/quantize.hpp"
#include "puppetry/relay/client.hpp"
#include "puppetry/relay/pose_payload.hpp"
#include "puppetry/relay/topics.hpp"
#include "puppetry/store/clip_store.hpp"

namespace puppetry::session {

namespace {

class Driver {
 public:
  Driver(relay::RelayClient& client, const RunnerOptions& options)
      : client_(client),
        options_(options),
        engine_(options.plan, options.clock),
        id_(options.plan.session_id),
        ctl_(relay::topics::session_ctl(id_)),
        status_(relay::topics::session_status(id_)),
        pose_(relay::topics::puppet_pose(id_)),
        state_(relay::topics::robot_state(id_)),
        cmd_(relay::topics::robot_cmd(id_)) {}

  SessionState run(const std::atomic<bool>& stop) {
    for (const auto& t : {ctl_, pose_, state_}) client_.subscribe(t);
    publish_status();
    while (!stop && client_.connected() && engine_.state().phase != Phase::SessionComplete) {
      auto frame = client_.receive(std::chrono::milliseconds(50));
      if (frame && frame->type == relay::FrameType::Publish) dispatch(*frame);
    }
    return engine_.state();
  }

 private:
  void dispatch(const relay::Frame& frame) {
    if (frame.topic == ctl_) {
      const std::string text(frame.payload.begin(), frame.payload.end());
      const auto command = parse_command(text);
      if (!command) {
        publish_status("ProtocolError: unknown command '" + text + "'");
        return;
      }
      try {
        apply(engine_.handle(*command));
      } catch (const Error& e) {
        publish_status(e.what());
      }
      return;
    }
    relay::PosePayload p;
    try {
      p = relay::decode_pose(frame.payload);
    } catch (const Error&) {
      return;
    }
    if (frame.topic == pose_) {
      engine_.on_puppet_pose(p.t_ms, ticks_to_degrees(p.ticks));
    } else if (frame.topic == state_) {
      apply(engine_.on_robot_sample(p.t_ms, ticks_to_degrees(p.ticks)));
    }
  }

  void apply(const Effects& fx) {
    for (const auto& clip : fx.persist) store::save(clip, options_.out_dir, options_.overwrite);
    if (fx.calibration_target) {
      send_command(fx.calibration_target->t_ms, fx.calibration_target->pose);
    }
    if (fx.status_changed) publish_status();
    if (fx.replay) replay(*fx.replay);
  }

  // Replay payloads depend only on the clip: seq counts from 0 per replay.
  void replay(const ExpressionClip& clip) {
    std::uint32_t seq = 0;
    for (const auto& s : clip.samples) {
      client_.publish(cmd_, relay::encode_pose({seq++, s.t_ms, degrees_to_ticks(s.pose)}));
      if (options_.pace) std::this_thread::sleep_for(std::chrono::milliseconds(clip.timestep_ms));
    }
  }

  void send_command(std::uint32_t t_ms, const Pose& pose) {
    client_.publish(cmd_, relay::encode_pose({seq_++, t_ms, degrees_to_ticks(pose)}));
  }

  void publish_status(const std::optional<std::string>& error = std::nullopt) {
    client_.publish_text(status_, status_json(engine_.state(), id_, engine_.calibration_satisfied(), error));
  }

  relay::RelayClient& client_;
  const RunnerOptions& options_;
  SessionEngine engine_;
  std::string id_, ctl_, status_, pose_, state_, cmd_;
  std::uint32_t seq_ = 0;
};

}  // namespace

SessionState run_session(relay::RelayClient& client, const RunnerOptions& options, const std::atomic<bool>& stop) {
  return Driver(client, options).run(stop);
}

}  // namespace puppetry::session
