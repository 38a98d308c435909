#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "puppetry/core/error.hpp"
#include "puppetry/core/quantize.hpp"
#include "puppetry/store/clip_store.hpp"
#include "support.hpp"

using namespace puppetry;
using namespace puppetry::store;
using testing_support::Gen;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / ("puppetry_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Random valid clip with poses already at on-disk precision.
ExpressionClip random_clip(Gen& g, std::uint32_t iteration) {
  std::vector<TrajectorySample> s;
  const std::uint32_t dt = g.coin() ? 20 : 10;
  std::uint32_t t = dt * static_cast<std::uint32_t>(g.integer(0, 3));
  const int n = g.integer(1, 120);
  for (int i = 0; i < n && t <= 5000; ++i) {
    s.push_back({t, canonical(g.pose())});
    t += dt * static_cast<std::uint32_t>(g.integer(1, 3));
  }
  auto c = testing_support::make_clip(std::move(s), kAllEmotions[g.integer(0, 5)], iteration);
  c.timestep_ms = dt;
  c.final = g.coin();
  c.designer_id = "des" + std::to_string(g.integer(0, 3));
  c.recorded_at_ms = 1700000000000 + g.integer(0, 1000000000);
  return c;
}

}  // namespace

TEST(Store, SaveLoadRoundTripProperty) {
  TempDir dir("roundtrip");
  Gen g(21);
  for (std::uint32_t i = 1; i <= 200; ++i) {
    const auto clip = random_clip(g, i);
    const auto path = save(clip, dir.path());
    EXPECT_EQ(path.filename().string(), clip_filename(clip));
    const auto back = load(path);
    ASSERT_EQ(back, clip);
    ASSERT_EQ(to_json(back), slurp(path));  // bitwise stable
  }
}

TEST(Store, FiveSecondClipHas251Samples) {
  TempDir dir("fivesec");
  auto clip = testing_support::make_clip(testing_support::sample_grid(5000, [](double t) {
    return std::pair{-90.0 + 10.0 * t, 0.0};
  }));
  const auto path = save(clip, dir.path());
  const auto back = load(path);
  EXPECT_EQ(back.samples.size(), 251u);
  EXPECT_EQ(back.duration_ms(), 5000u);
  const auto csv = export_csv(back);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 252);
}

TEST(Store, FilenameConvention) {
  auto clip = testing_support::make_clip({{0, {}}}, Emotion::Sadness, 3);
  EXPECT_EQ(clip_filename(clip), "d1_sadness_3.clip.json");
}

TEST(Store, RefusesOverwriteUnlessAsked) {
  TempDir dir("overwrite");
  auto clip = testing_support::make_clip({{0, {}}});
  save(clip, dir.path());
  try {
    save(clip, dir.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FileExists);
  }
  clip.final = true;
  save(clip, dir.path(), true);
  EXPECT_TRUE(load(dir.path() / clip_filename(clip)).final);
}

TEST(Store, UnsortedSamplesAreCorrupt) {
  auto clip = testing_support::make_clip({{0, {}}, {20, {}}});
  auto text = to_json(clip);
  const auto pos = text.find("[20,");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 4, "[ 0,");
  const auto first = text.find("[0,");
  text.replace(first, 3, "[40,");
  try {
    from_json(text);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ClipCorrupt);
  }
}

TEST(Store, MalformedDocumentsAreCorrupt) {
  const auto good = to_json(testing_support::make_clip({{0, {}}}));
  for (const std::string& bad : {std::string("{"), std::string("[]"),
                                 [&] { auto s = good; s.replace(s.find("\"format_version\": 1"), 19, "\"format_version\": 2"); return s; }(),
                                 [&] { auto s = good; s.replace(s.find("happiness"), 9, "joy"); return s; }(),
                                 [&] { auto s = good; s.replace(s.find("\"samples\""), 9, "\"frames\""); return s; }()}) {
    try {
      from_json(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ClipCorrupt);
    }
  }
}

TEST(Store, ScanEmptyDir) {
  TempDir dir("scan_empty");
  const auto c = scan(dir.path());
  EXPECT_TRUE(c.entries.empty());
  EXPECT_TRUE(c.warnings.empty());
}

TEST(Store, ScanReportsCorruptFiles) {
  TempDir dir("scan_mixed");
  save(testing_support::make_clip({{0, {}}}), dir.path());
  std::ofstream(dir.path() / "broken_anger_1.clip.json") << "{not json";
  std::ofstream(dir.path() / "notes.txt") << "ignored";
  const auto c = scan(dir.path());
  EXPECT_EQ(c.entries.size(), 1u);
  EXPECT_EQ(c.warnings.size(), 1u);
}

TEST(Store, CatalogCountsMatchValidFiles) {
  Gen g(33);
  for (int lib = 0; lib < 10; ++lib) {
    TempDir dir("catalog_" + std::to_string(lib));
    const int valid = g.integer(0, 15), corrupt = g.integer(0, 4);
    int finals = 0;
    for (int i = 1; i <= valid; ++i) {
      auto clip = random_clip(g, static_cast<std::uint32_t>(i));
      finals += clip.final;
      save(clip, dir.path());
    }
    for (int i = 0; i < corrupt; ++i) {
      std::ofstream(dir.path() / ("bad_fear_" + std::to_string(i) + ".clip.json")) << g.text(30);
    }
    const auto c = scan(dir.path());
    ASSERT_EQ(c.entries.size(), static_cast<std::size_t>(valid));
    ASSERT_EQ(c.warnings.size(), static_cast<std::size_t>(corrupt));
    ASSERT_EQ(std::count_if(c.entries.begin(), c.entries.end(), [](const auto& e) { return e.final; }), finals);
  }
}

TEST(Store, CsvSingleSample) {
  const auto clip = testing_support::make_clip({{0, Pose(0.0, 0.0)}});
  EXPECT_EQ(export_csv(clip), "t_ms,pan_deg,tilt_deg\n0,0.0000,0.0000\n");
}

TEST(Store, CsvRoundTripProperty) {
  Gen g(44);
  for (int i = 0; i < 200; ++i) {
    const auto clip = random_clip(g, 1);
    ASSERT_EQ(parse_csv_samples(export_csv(clip)), clip.samples);
  }
  EXPECT_THROW(parse_csv_samples("t_ms,pan_deg,tilt_deg\n0,abc,1\n"), Error);
}

TEST(Store, DegreeFormatting) {
  EXPECT_EQ(format_degrees(-0.0), "0.0000");
  EXPECT_EQ(format_degrees(-89.88269794721407), "-89.8827");
  EXPECT_EQ(format_degrees(150.0), "150.0000");
}

TEST(Store, UtcRoundTrip) {
  EXPECT_EQ(format_utc(0), "1970-01-01T00:00:00.000Z");
  EXPECT_EQ(format_utc(951782400123), "2000-02-29T00:00:00.123Z");
  Gen g(55);
  for (int i = 0; i < 1000; ++i) {
    const std::int64_t ms = static_cast<std::int64_t>(g.uniform(-1e12, 4e12));
    ASSERT_EQ(parse_utc(format_utc(ms)), ms);
  }
}
