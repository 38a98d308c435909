#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "puppetry/core/emotion.hpp"

namespace puppetry::recognition {

struct RatingRecord {
  std::string rater_id;
  std::string clip_id;
  Emotion word = Emotion::Anger;
  int rating = 1;  // 1..4

  friend bool operator==(const RatingRecord&, const RatingRecord&) = default;
};

struct RejectedRow {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string reason;
};

struct IngestResult {
  std::vector<RatingRecord> records;
  std::vector<RejectedRow> rejected;
};

/// Parses "rater_id,clip_id,word,rating" CSV. Bad rows are collected, not
/// fatal; a missing or wrong header throws Error(DataError).
IngestResult ingest(std::string_view csv);

using Intents = std::map<std::string, Emotion>;

/// Parses "clip_id,emotion" CSV. Throws Error(DataError) on any bad row.
Intents parse_intents(std::string_view csv);

/// Maps a mean rating in [1, 4] onto [0, 1].
double weight_for(double mean_rating);

struct RecognizabilityReport {
  std::string clip_id;
  Emotion intended = Emotion::Anger;
  double mean_intended = 0.0;
  std::map<Emotion, double> mean_by_word;  // only words with >= 1 rating
  /// mean_intended minus the best non-intended mean; empty when no other word
  /// was rated.
  std::optional<double> discriminability;
  double weight = 0.0;
  std::size_t n_raters = 0;
};

struct ClipError {
  std::string clip_id;
  std::string reason;
};

struct ReportResult {
  std::vector<RecognizabilityReport> reports;  // sorted by clip_id
  std::vector<ClipError> errors;               // e.g. intended word never rated
};

/// Throws Error(UnknownClip) when a rated clip has no intent.
ReportResult report(std::span<const RatingRecord> records, const Intents& intents);

/// Rows are intended emotions, columns rated words, both in listing order.
/// A cell is empty when no clip of that row received that word.
using ConfusionMatrix = std::array<std::array<std::optional<double>, 6>, 6>;

/// Throws Error(NoData) on empty input and Error(UnknownClip) as report().
ConfusionMatrix confusion(std::span<const RatingRecord> records, const Intents& intents);

std::string to_json(const ReportResult& result, const ConfusionMatrix* confusion = nullptr);
std::string to_csv(const ReportResult& result);
std::string to_csv(const ConfusionMatrix& matrix);

}  // namespace puppetry::recognition
