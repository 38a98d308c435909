#include "puppetry/store/clip_store.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "puppetry/core/error.hpp"
#include "puppetry/core/quantize.hpp"

namespace puppetry::store {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Howard Hinnant's civil calendar algorithms (proleptic Gregorian).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y = static_cast<std::int64_t>(yoe) + era * 400 + (m <= 2);
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) { return a / b - ((a % b != 0) && ((a < 0) != (b < 0))); }

[[noreturn]] void corrupt(const std::string& why) { throw Error(ErrorCode::ClipCorrupt, why); }

}  // namespace

std::string format_degrees(double degrees) {
  const double v = round_to_4dp(degrees);
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 4);
  return std::string(buf, ptr);
}

std::string format_utc(std::int64_t epoch_ms) {
  const std::int64_t days = floor_div(epoch_ms, 86'400'000);
  std::int64_t rem = epoch_ms - days * 86'400'000;
  std::int64_t y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  const int hh = static_cast<int>(rem / 3'600'000);
  rem %= 3'600'000;
  const int mm = static_cast<int>(rem / 60'000);
  rem %= 60'000;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<long long>(y), m, d, hh, mm,
                static_cast<int>(rem / 1000), static_cast<int>(rem % 1000));
  return buf;
}

std::int64_t parse_utc(std::string_view text) {
  long long y;
  unsigned mo, d, hh, mi, ss, ms;
  char z = 0;
  const std::string s(text);
  if (std::sscanf(s.c_str(), "%lld-%u-%uT%u:%u:%u.%3u%c", &y, &mo, &d, &hh, &mi, &ss, &ms, &z) != 8 || z != 'Z' ||
      mo < 1 || mo > 12 || d < 1 || d > 31 || hh > 23 || mi > 59 || ss > 60 || s.size() != 24) {
    throw Error(ErrorCode::DataError, "bad UTC timestamp '" + s + "'");
  }
  return days_from_civil(y, mo, d) * 86'400'000 + hh * 3'600'000LL + mi * 60'000LL + ss * 1000LL + ms;
}

std::string to_json(const ExpressionClip& clip) {
  std::ostringstream out;
  out << "{\n"
      << "  \"format_version\": " << kFormatVersion << ",\n"
      << "  \"header\": {\n"
      << "    \"clip_id\": " << json(clip.clip_id).dump() << ",\n"
      << "    \"emotion\": \"" << to_string(clip.emotion) << "\",\n"
      << "    \"designer_id\": " << json(clip.designer_id).dump() << ",\n"
      << "    \"iteration\": " << clip.iteration << ",\n"
      << "    \"final\": " << (clip.final ? "true" : "false") << ",\n"
      << "    \"timestep_ms\": " << clip.timestep_ms << ",\n"
      << "    \"recorded_at\": \"" << format_utc(clip.recorded_at_ms) << "\"\n"
      << "  },\n"
      << "  \"samples\": [";
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    const auto& s = clip.samples[i];
    out << (i == 0 ? "\n" : ",\n") << "    [" << s.t_ms << ", " << format_degrees(s.pose.pan()) << ", "
        << format_degrees(s.pose.tilt()) << "]";
  }
  out << (clip.samples.empty() ? "]\n" : "\n  ]\n") << "}\n";
  return out.str();
}

ExpressionClip from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    corrupt(std::string("not valid JSON: ") + e.what());
  }
  ExpressionClip clip;
  try {
    if (j.at("format_version").get<int>() != kFormatVersion) corrupt("unsupported format_version");
    const auto& h = j.at("header");
    clip.clip_id = h.at("clip_id").get<std::string>();
    const auto emotion = parse_emotion(h.at("emotion").get<std::string>());
    if (!emotion) corrupt("unknown emotion");
    clip.emotion = *emotion;
    clip.designer_id = h.at("designer_id").get<std::string>();
    clip.iteration = h.at("iteration").get<std::uint32_t>();
    clip.final = h.at("final").get<bool>();
    clip.timestep_ms = h.at("timestep_ms").get<std::uint32_t>();
    clip.recorded_at_ms = parse_utc(h.at("recorded_at").get<std::string>());
    for (const auto& row : j.at("samples")) {
      if (!row.is_array() || row.size() != 3 || !row[0].is_number_unsigned()) corrupt("malformed sample row");
      const double pan = row[1].get<double>();
      const double tilt = row[2].get<double>();
      if (pan < kPanMinDeg || pan > kPanMaxDeg || tilt < kTiltMinDeg || tilt > kTiltMaxDeg) {
        corrupt("sample pose out of range");
      }
      clip.samples.push_back({row[0].get<std::uint32_t>(), canonical(Pose{pan, tilt})});
    }
  } catch (const json::exception& e) {
    corrupt(std::string("missing or mistyped field: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ClipCorrupt) throw;
    corrupt(e.what());
  }
  validate(clip);
  return clip;
}

std::string clip_filename(const ExpressionClip& clip) {
  return clip.designer_id + "_" + std::string(to_string(clip.emotion)) + "_" + std::to_string(clip.iteration) +
         ".clip.json";
}

fs::path save(const ExpressionClip& clip, const fs::path& dir, bool overwrite) {
  validate(clip);
  fs::create_directories(dir);
  const fs::path target = dir / clip_filename(clip);
  if (!overwrite && fs::exists(target)) {
    throw Error(ErrorCode::FileExists, target.string() + " already exists");
  }
  const fs::path tmp = dir / ("." + clip_filename(clip) + ".tmp");
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::DataError, "cannot write " + tmp.string());
    const std::string text = to_json(clip);
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f.flush()) throw Error(ErrorCode::DataError, "cannot write " + tmp.string());
  }
  fs::rename(tmp, target);
  return target;
}

ExpressionClip load(const fs::path& file) {
  std::ifstream f(file, std::ios::binary);
  if (!f) throw Error(ErrorCode::DataError, "cannot read " + file.string());
  std::ostringstream buf;
  buf << f.rdbuf();
  return from_json(buf.str());
}

Catalog scan(const fs::path& dir) {
  Catalog catalog;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.ends_with(".clip.json") && !name.starts_with(".")) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    try {
      const ExpressionClip clip = load(path);
      catalog.entries.push_back({path, clip.clip_id, clip.emotion, clip.designer_id, clip.iteration, clip.final,
                                 clip.timestep_ms, clip.recorded_at_ms, clip.duration_ms(), clip.samples.size()});
    } catch (const Error& e) {
      catalog.warnings.push_back({path, e.what()});
    }
  }
  return catalog;
}

std::string export_csv(const ExpressionClip& clip) {
  std::string out = "t_ms,pan_deg,tilt_deg\n";
  for (const auto& s : clip.samples) {
    out += std::to_string(s.t_ms);
    out += ',';
    out += format_degrees(s.pose.pan());
    out += ',';
    out += format_degrees(s.pose.tilt());
    out += '\n';
  }
  return out;
}

std::vector<TrajectorySample> parse_csv_samples(std::string_view csv) {
  std::vector<TrajectorySample> samples;
  std::size_t line_no = 0;
  while (!csv.empty()) {
    const auto nl = csv.find('\n');
    std::string_view line = csv.substr(0, nl);
    csv = nl == std::string_view::npos ? std::string_view{} : csv.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    if (line_no == 1) {
      if (line != "t_ms,pan_deg,tilt_deg") throw Error(ErrorCode::DataError, "unexpected CSV header");
      continue;
    }
    if (line.empty()) continue;
    std::uint32_t t = 0;
    double pan = 0, tilt = 0;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    auto bad = [&] { return Error(ErrorCode::DataError, "bad CSV row at line " + std::to_string(line_no)); };
    auto r1 = std::from_chars(p, end, t);
    if (r1.ec != std::errc{} || r1.ptr == end || *r1.ptr != ',') throw bad();
    auto r2 = std::from_chars(r1.ptr + 1, end, pan);
    if (r2.ec != std::errc{} || r2.ptr == end || *r2.ptr != ',') throw bad();
    auto r3 = std::from_chars(r2.ptr + 1, end, tilt);
    if (r3.ec != std::errc{} || r3.ptr != end) throw bad();
    samples.push_back({t, canonical(Pose{pan, tilt})});
  }
  return samples;
}

}  // namespace puppetry::store
