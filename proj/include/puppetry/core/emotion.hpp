#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace puppetry {

/// The six basic emotions, declared in the order used for session plans and
/// confusion-matrix rows.
enum class Emotion { Anger, Disgust, Fear, Happiness, Sadness, Surprise };

inline constexpr std::array<Emotion, 6> kAllEmotions = {
    Emotion::Anger,     Emotion::Disgust, Emotion::Fear,
    Emotion::Happiness, Emotion::Sadness, Emotion::Surprise,
};

inline constexpr std::size_t index_of(Emotion e) { return static_cast<std::size_t>(e); }

std::string_view to_string(Emotion e);

/// Accepts the lower-case names produced by to_string().
std::optional<Emotion> parse_emotion(std::string_view name);

}  // namespace puppetry
