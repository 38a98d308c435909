#include "puppetry/recognition/ratings.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include "json.hpp"

#include "puppetry/core/error.hpp"

namespace puppetry::recognition {
namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  for (;;) {
    const auto comma = line.find(',');
    fields.push_back(trim(line.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return fields;
}

std::string_view strip_bom(std::string_view s) {
  if (s.starts_with("\xEF\xBB\xBF")) s.remove_prefix(3);
  return s;
}

// Per clip: per word, (sum, count) of ratings.
struct ClipTally {
  std::array<long long, 6> sum{};
  std::array<std::size_t, 6> count{};
  std::set<std::string> raters;
};

std::map<std::string, ClipTally> tally(std::span<const RatingRecord> records, const Intents& intents) {
  std::map<std::string, ClipTally> by_clip;
  for (const auto& r : records) {
    if (!intents.contains(r.clip_id)) {
      throw Error(ErrorCode::UnknownClip, "no intended emotion for clip '" + r.clip_id + "'");
    }
    auto& t = by_clip[r.clip_id];
    t.sum[index_of(r.word)] += r.rating;
    ++t.count[index_of(r.word)];
    t.raters.insert(r.rater_id);
  }
  return by_clip;
}

}  // namespace

IngestResult ingest(std::string_view csv) {
  IngestResult result;
  const auto lines = split_lines(strip_bom(csv));
  if (lines.empty() || (lines.size() == 1 && lines[0].empty())) return result;
  const auto header = split_fields(lines[0]);
  if (header != std::vector<std::string_view>{"rater_id", "clip_id", "word", "rating"}) {
    throw Error(ErrorCode::DataError, "ratings CSV must start with header rater_id,clip_id,word,rating");
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (trim(lines[i]).empty()) continue;
    const auto f = split_fields(lines[i]);
    auto reject = [&](std::string reason) { result.rejected.push_back({line_no, std::move(reason)}); };
    if (f.size() != 4) {
      reject("expected 4 fields, got " + std::to_string(f.size()));
      continue;
    }
    if (f[0].empty() || f[1].empty()) {
      reject("empty rater_id or clip_id");
      continue;
    }
    const auto word = parse_emotion(f[2]);
    if (!word) {
      reject("unknown word '" + std::string(f[2]) + "'");
      continue;
    }
    int rating = 0;
    auto [ptr, ec] = std::from_chars(f[3].data(), f[3].data() + f[3].size(), rating);
    if (ec != std::errc{} || ptr != f[3].data() + f[3].size()) {
      reject("rating '" + std::string(f[3]) + "' is not an integer");
      continue;
    }
    if (rating < 1 || rating > 4) {
      reject("rating " + std::to_string(rating) + " outside [1,4]");
      continue;
    }
    result.records.push_back({std::string(f[0]), std::string(f[1]), *word, rating});
  }
  return result;
}

Intents parse_intents(std::string_view csv) {
  Intents intents;
  const auto lines = split_lines(strip_bom(csv));
  if (lines.empty()) return intents;
  if (split_fields(lines[0]) != std::vector<std::string_view>{"clip_id", "emotion"}) {
    throw Error(ErrorCode::DataError, "intents CSV must start with header clip_id,emotion");
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const auto f = split_fields(lines[i]);
    const auto e = f.size() == 2 ? parse_emotion(f[1]) : std::nullopt;
    if (!e || f[0].empty()) throw Error(ErrorCode::DataError, "bad intents row at line " + std::to_string(i + 1));
    intents[std::string(f[0])] = *e;
  }
  return intents;
}

double weight_for(double mean_rating) { return (mean_rating - 1.0) / 3.0; }

ReportResult report(std::span<const RatingRecord> records, const Intents& intents) {
  ReportResult result;
  for (const auto& [clip_id, t] : tally(records, intents)) {
    const Emotion intended = intents.at(clip_id);
    if (t.count[index_of(intended)] == 0) {
      result.errors.push_back({clip_id, "intended word '" + std::string(to_string(intended)) + "' was never rated"});
      continue;
    }
    RecognizabilityReport r;
    r.clip_id = clip_id;
    r.intended = intended;
    r.n_raters = t.raters.size();
    for (Emotion w : kAllEmotions) {
      const auto k = index_of(w);
      if (t.count[k] > 0) r.mean_by_word[w] = static_cast<double>(t.sum[k]) / static_cast<double>(t.count[k]);
    }
    r.mean_intended = r.mean_by_word.at(intended);
    for (const auto& [w, m] : r.mean_by_word) {
      if (w == intended) continue;
      const double d = r.mean_intended - m;
      if (!r.discriminability || d < *r.discriminability) r.discriminability = d;
    }
    r.weight = weight_for(r.mean_intended);
    result.reports.push_back(std::move(r));
  }
  return result;
}

ConfusionMatrix confusion(std::span<const RatingRecord> records, const Intents& intents) {
  if (records.empty()) throw Error(ErrorCode::NoData, "no ratings");
  std::array<std::array<double, 6>, 6> sum{};
  std::array<std::array<std::size_t, 6>, 6> n{};
  for (const auto& [clip_id, t] : tally(records, intents)) {
    const auto row = index_of(intents.at(clip_id));
    for (std::size_t col = 0; col < 6; ++col) {
      if (t.count[col] == 0) continue;
      sum[row][col] += static_cast<double>(t.sum[col]) / static_cast<double>(t.count[col]);
      ++n[row][col];
    }
  }
  ConfusionMatrix m{};
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) {
      if (n[i][j] > 0) m[i][j] = sum[i][j] / static_cast<double>(n[i][j]);
    }
  }
  return m;
}

std::string to_json(const ReportResult& result, const ConfusionMatrix* matrix) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["reports"] = ordered_json::array();
  for (const auto& r : result.reports) {
    ordered_json o;
    o["clip_id"] = r.clip_id;
    o["intended"] = to_string(r.intended);
    o["mean_intended"] = r.mean_intended;
    ordered_json by_word = ordered_json::object();
    for (const auto& [w, m] : r.mean_by_word) by_word[std::string(to_string(w))] = m;
    o["mean_by_word"] = by_word;
    o["discriminability"] = r.discriminability ? ordered_json(*r.discriminability) : ordered_json(nullptr);
    o["weight"] = r.weight;
    o["n_raters"] = r.n_raters;
    j["reports"].push_back(o);
  }
  j["errors"] = ordered_json::array();
  for (const auto& e : result.errors) j["errors"].push_back({{"clip_id", e.clip_id}, {"reason", e.reason}});
  if (matrix) {
    ordered_json rows = ordered_json::object();
    for (Emotion i : kAllEmotions) {
      ordered_json row = ordered_json::object();
      for (Emotion w : kAllEmotions) {
        const auto& cell = (*matrix)[index_of(i)][index_of(w)];
        row[std::string(to_string(w))] = cell ? ordered_json(*cell) : ordered_json(nullptr);
      }
      rows[std::string(to_string(i))] = row;
    }
    j["confusion"] = rows;
  }
  return j.dump(2);
}

namespace {

std::string num(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 4);
  return std::string(buf, ptr);
}

}  // namespace

std::string to_csv(const ReportResult& result) {
  std::ostringstream out;
  out << "clip_id,intended,mean_intended,discriminability,weight,n_raters";
  for (Emotion w : kAllEmotions) out << ",mean_" << to_string(w);
  out << '\n';
  for (const auto& r : result.reports) {
    out << r.clip_id << ',' << to_string(r.intended) << ',' << num(r.mean_intended) << ','
        << (r.discriminability ? num(*r.discriminability) : "") << ',' << num(r.weight) << ',' << r.n_raters;
    for (Emotion w : kAllEmotions) {
      out << ',';
      if (auto it = r.mean_by_word.find(w); it != r.mean_by_word.end()) out << num(it->second);
    }
    out << '\n';
  }
  return out.str();
}

std::string to_csv(const ConfusionMatrix& matrix) {
  std::ostringstream out;
  out << "intended";
  for (Emotion w : kAllEmotions) out << ',' << to_string(w);
  out << '\n';
  for (Emotion i : kAllEmotions) {
    out << to_string(i);
    for (Emotion w : kAllEmotions) {
      out << ',';
      if (const auto& c = matrix[index_of(i)][index_of(w)]) out << num(*c);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace puppetry::recognition
