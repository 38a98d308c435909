#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "puppetry/core/clip.hpp"

namespace puppetry::store {

inline constexpr int kFormatVersion = 1;

/// Canonical JSON text of a clip. Degrees carry exactly four decimals, so two
/// clips equal at that precision serialize to identical bytes.
std::string to_json(const ExpressionClip& clip);

/// Throws Error(ClipCorrupt) on malformed JSON, a wrong version, or any clip
/// invariant violation (e.g. unsorted sample times).
ExpressionClip from_json(std::string_view text);

/// "<designer_id>_<emotion>_<iteration>.clip.json"
std::string clip_filename(const ExpressionClip& clip);

/// Writes atomically (temp file + rename). Throws Error(FileExists) when the
/// target exists and `overwrite` is false.
std::filesystem::path save(const ExpressionClip& clip, const std::filesystem::path& dir, bool overwrite = false);

ExpressionClip load(const std::filesystem::path& file);

struct CatalogEntry {
  std::filesystem::path path;
  std::string clip_id;
  Emotion emotion = Emotion::Anger;
  std::string designer_id;
  std::uint32_t iteration = 0;
  bool final = false;
  std::uint32_t timestep_ms = 0;
  std::int64_t recorded_at_ms = 0;
  std::uint32_t duration_ms = 0;
  std::size_t sample_count = 0;
};

struct ScanWarning {
  std::filesystem::path path;
  std::string reason;
};

struct Catalog {
  std::vector<CatalogEntry> entries;   // sorted by path
  std::vector<ScanWarning> warnings;   // unparseable *.clip.json files
};

/// Non-recursive scan of *.clip.json files.
Catalog scan(const std::filesystem::path& dir);

/// "t_ms,pan_deg,tilt_deg" header then one row per sample, '\n' line ends.
std::string export_csv(const ExpressionClip& clip);

/// Inverse of export_csv for the sample rows. Throws Error(DataError).
std::vector<TrajectorySample> parse_csv_samples(std::string_view csv);

/// Fixed four-decimal rendering, independent of the global locale.
std::string format_degrees(double degrees);

std::string format_utc(std::int64_t epoch_ms);
/// Accepts the "YYYY-MM-DDTHH:MM:SS.mmmZ" form written by format_utc.
std::int64_t parse_utc(std::string_view text);

}  // namespace puppetry::store
