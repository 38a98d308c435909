#include "puppetry/core/clip.hpp"

#include "puppetry/core/error.hpp"

namespace puppetry {

void validate(const ExpressionClip& clip) {
  auto corrupt = [&](const std::string& why) {
    throw Error(ErrorCode::ClipCorrupt, "clip '" + clip.clip_id + "': " + why);
  };
  if (clip.timestep_ms == 0) corrupt("timestep must be positive");
  if (clip.iteration == 0) corrupt("iteration must be positive");
  if (clip.samples.empty()) corrupt("no samples");
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    const auto t = clip.samples[i].t_ms;
    if (t % clip.timestep_ms != 0) {
      corrupt("sample " + std::to_string(i) + " at t=" + std::to_string(t) + " is off the timestep grid");
    }
    if (i > 0 && t <= clip.samples[i - 1].t_ms) {
      corrupt("sample times not strictly increasing at index " + std::to_string(i));
    }
  }
  if (clip.duration_ms() > kMaxClipDurationMs) {
    corrupt("duration " + std::to_string(clip.duration_ms()) + " ms exceeds 5000 ms");
  }
}

}  // namespace puppetry
