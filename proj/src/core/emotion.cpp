#include "puppetry/core/emotion.hpp"

namespace puppetry {

std::string_view to_string(Emotion e) {
  switch (e) {
    case Emotion::Anger: return "anger";
    case Emotion::Disgust: return "disgust";
    case Emotion::Fear: return "fear";
    case Emotion::Happiness: return "happiness";
    case Emotion::Sadness: return "sadness";
    case Emotion::Surprise: return "surprise";
  }
  return "";
}

std::optional<Emotion> parse_emotion(std::string_view name) {
  for (Emotion e : kAllEmotions) {
    if (to_string(e) == name) return e;
  }
  return std::nullopt;
}

}  // namespace puppetry
