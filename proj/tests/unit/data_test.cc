// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fairgan/core/errors.h"
#include "fairgan/core/validate.h"
#include "fairgan/data/image_io.h"
#include "fairgan/data/loader.h"
#include "fairgan/data/manifest.h"
#include "fairgan/data/outcome.h"
#include "fairgan/data/strokes.h"
#include "fairgan/data/synthetic.h"
#include "json.hpp"

namespace fairgan::data {
namespace {

namespace fs = std::filesystem;

fs::path TempDir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("fairgan_data_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Image8 Solid(int w, int h, int channels, std::uint8_t v) {
  return {w, h, channels, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h * channels, v)};
}

void WriteText(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

// ---- image I/O -------------------------------------------------------------

TEST(ImageIoTest, PngRoundTripGrayAndRgb) {
  const auto dir = TempDir("png");
  std::mt19937 rng(1);
  for (int ch : {1, 3}) {
    Image8 img{5, 3, ch, {}};
    for (int i = 0; i < 5 * 3 * ch; ++i) img.pixels.push_back(static_cast<std::uint8_t>(rng()));
    const auto path = (dir / ("img" + std::to_string(ch) + ".png")).string();
    WritePng(path, img);
    EXPECT_EQ(ReadPng(path), img);
  }
}

TEST(ImageIoTest, RescaleEndpoints) {
  const auto white = ToUnitChw(Solid(4, 4, 1, 255), {1, 4, 4});
  const auto black = ToUnitChw(Solid(4, 4, 1, 0), {1, 4, 4});
  for (float v : white) EXPECT_EQ(v, 1.0f);
  for (float v : black) EXPECT_EQ(v, -1.0f);
}

TEST(ImageIoTest, ChannelConversion) {
  Image8 rgb{1, 1, 3, {200, 100, 50}};
  const auto gray = ToUnitChw(rgb, {1, 1, 1});
  EXPECT_NEAR(gray[0], (0.299 * 200 + 0.587 * 100 + 0.114 * 50) / 127.5 - 1, 1e-6);
  const auto rep = ToUnitChw(Image8{1, 1, 1, {51}}, {3, 1, 1});
  EXPECT_EQ(rep, std::vector<float>(3, PixelToUnit(51)));
}

TEST(ImageIoTest, CorruptAndMissingFilesThrow) {
  const auto dir = TempDir("corrupt");
  WriteText(dir / "bad.png", "not an image");
  EXPECT_THROW(ReadPng((dir / "bad.png").string()), DataError);
  EXPECT_THROW(ReadPng((dir / "none.png").string()), DataError);
  // Valid signature, truncated body.
  WritePng((dir / "ok.png").string(), Solid(8, 8, 1, 7));
  std::ifstream in(dir / "ok.png", std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), {});
  WriteText(dir / "trunc.png", bytes.substr(0, 40));
  EXPECT_THROW(ReadPng((dir / "trunc.png").string()), DataError);
}

TEST(ResizeTest, UpsampleHalfPixelCenters) {
  const std::vector<float> src = {0, 1, 2, 3};
  const auto out = ResizeBilinear(src, {1, 2, 2}, 4, 4);
  // Source coordinates of the 4 destination columns: -0.25->0, 0.25, 0.75, 1.25->1.
  const float row0[] = {0, 0.25f, 0.75f, 1};
  for (int q = 0; q < 4; ++q) EXPECT_FLOAT_EQ(out[q], row0[q]);
  EXPECT_FLOAT_EQ(out[3 * 4 + 3], 3);
}

TEST(ResizeTest, HalvingAveragesBlocksAndIdentityKeeps) {
  std::mt19937 rng(2);
  std::uniform_real_distribution<float> u(-1, 1);
  std::vector<float> src(2 * 6 * 6);
  for (auto& v : src) v = u(rng);
  const auto out = ResizeBilinear(src, {2, 6, 6}, 3, 3);
  for (int c = 0; c < 2; ++c)
    for (int r = 0; r < 3; ++r)
      for (int q = 0; q < 3; ++q) {
        auto at = [&](int rr, int qq) { return src[c * 36 + rr * 6 + qq]; };
        const float mean = (at(2 * r, 2 * q) + at(2 * r, 2 * q + 1) + at(2 * r + 1, 2 * q) +
                            at(2 * r + 1, 2 * q + 1)) / 4;
        EXPECT_NEAR(out[c * 9 + r * 3 + q], mean, 1e-6);
      }
  EXPECT_EQ(ResizeBilinear(src, {2, 6, 6}, 6, 6), src);
}

// ---- manifest and loader ---------------------------------------------------

TEST(ManifestTest, ParsesAndRoundTrips) {
  std::istringstream in("image_path,c,y\r\na.png,0,1\n\"dir/b,c.png\",1,\n");
  const auto m = ParseManifest(in);
  ASSERT_EQ(m.rows.size(), 2u);
  EXPECT_EQ(m.rows[1].image_path, "dir/b,c.png");
  EXPECT_FALSE(m.rows[1].y.has_value());
  std::ostringstream out;
  WriteManifest(out, m);
  std::istringstream back(out.str());
  EXPECT_EQ(ParseManifest(back), m);

  Manifest soft{{{"x.png", 1, 0, -0.125f}}};
  std::ostringstream so;
  WriteManifest(so, soft);
  std::istringstream sb(so.str());
  EXPECT_EQ(ParseManifest(sb), soft);
}

TEST(ManifestTest, RejectsBadInput) {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return ParseManifest(in);
  };
  EXPECT_THROW(parse(""), DataError);
  EXPECT_THROW(parse("path,c\n"), DataError);
  EXPECT_THROW(parse("image_path,c\na.png,2\n"), DataError);
  EXPECT_THROW(parse("image_path,c,y\na.png,0,1\na.png,1,0\n"), DataError);
  EXPECT_THROW(parse("image_path,c,y\na.png,0\n"), DataError);
  EXPECT_THROW(parse("image_path,c,y\n/abs.png,0,1\n"), DataError);
  EXPECT_THROW(parse("image_path,c,y,y_soft\na.png,0,,0.5\n"), DataError);
  EXPECT_NO_THROW(parse("image_path,c\na.png,1\n"));
}

class LoaderTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = TempDir("loader");
    fs::create_directories(dir_ / "img");
    WritePng((dir_ / "img/a.png").string(), Solid(4, 4, 1, 255));
    WritePng((dir_ / "img/b.png").string(), Solid(4, 4, 1, 0));
    WritePng((dir_ / "img/c.png").string(), Solid(8, 8, 3, 128));
  }
  fs::path dir_;
};

TEST_F(LoaderTest, LabeledManifest) {
  const Manifest m{{{"img/a.png", 0, 1, {}}, {"img/b.png", 1, 0, {}}, {"img/c.png", 1, 1, {}}}};
  const auto d = LoadAttributedImages(dir_.string(), m, {1, 4, 4});
  ASSERT_EQ(d.size(), 3u);
  EXPECT_TRUE(d.outcome_labeled);
  EXPECT_EQ(d.samples[0].x, std::vector<float>(16, 1.0f));
  EXPECT_EQ(d.samples[1].x, std::vector<float>(16, -1.0f));
  EXPECT_EQ(d.samples[1].c, 1);
  EXPECT_EQ(*d.samples[2].y_hard, 1);
  for (float v : d.samples[2].x) EXPECT_NEAR(v, PixelToUnit(128), 1e-6);
  EXPECT_TRUE(ValidateDataset(d).empty());
}

TEST_F(LoaderTest, UnlabeledAndMixed) {
  const Manifest unl{{{"img/a.png", 0, {}, {}}, {"img/b.png", 1, {}, {}}}};
  EXPECT_FALSE(LoadAttributedImages(dir_.string(), unl, {1, 4, 4}).outcome_labeled);
  const Manifest mixed{{{"img/a.png", 0, 1, {}}, {"img/b.png", 1, {}, {}}}};
  EXPECT_THROW(LoadAttributedImages(dir_.string(), mixed, {1, 4, 4}), DataError);
}

TEST_F(LoaderTest, MissingFileNamesRow) {
  const Manifest m{{{"img/a.png", 0, 1, {}}, {"img/zzz.png", 1, 0, {}}}};
  try {
    LoadAttributedImages(dir_.string(), m, {1, 4, 4});
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("img/zzz.png"), std::string::npos);
  }
}

TEST(DirectoryTest, RoundTripsThroughIngestion) {
  SyntheticBiasSpec spec;
  spec.n = 12;
  spec.image_size = 16;
  auto d = SynthesizeBiasedDataset(spec).dataset;
  for (std::size_t i = 0; i < d.size(); ++i) d.samples[i].y_soft = 0.1f * (i % 5) - 0.2f;
  const auto dir = TempDir("roundtrip");
  WriteAttributedDirectory(dir.string(), d);
  const auto back = LoadAttributedDirectory(dir.string(), d.image_shape);
  EXPECT_EQ(back, QuantizePixels(d));
  // Second trip is exact.
  const auto dir2 = TempDir("roundtrip2");
  WriteAttributedDirectory(dir2.string(), back);
  EXPECT_EQ(LoadAttributedDirectory(dir2.string(), d.image_shape), back);
}

// ---- strokes ---------------------------------------------------------------

std::vector<std::uint8_t> ReadFileBytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

TEST(RasterTest, GoldenFixturesAreByteIdentical) {
  const fs::path golden(FAIRGAN_GOLDEN_DIR);
  const auto fixtures =
      nlohmann::json::parse(std::ifstream(golden / "raster_fixtures.json"));
  ASSERT_GE(fixtures.size(), 4u);
  for (const auto& f : fixtures) {
    StrokeDrawing d;
    for (const auto& s : f["strokes"]) {
      std::vector<StrokePoint> pts;
      for (const auto& p : s) pts.push_back({p[0].get<long long>(), p[1].get<long long>()});
      d.strokes.push_back(pts);
    }
    const int size = f["size"];
    const auto r = RasterizeStrokes(d, size);
    const auto pgm = EncodePgm(FromUnitChw(r.pixels, {1, size, size}));
    const auto expected = ReadFileBytes(golden / (f["name"].get<std::string>() + ".pgm"));
    EXPECT_EQ(std::vector<std::uint8_t>(pgm.begin(), pgm.end()), expected) << f["name"];
    EXPECT_EQ(r.blank, d.strokes.empty());
  }
}

TEST(RasterTest, HorizontalStrokeSpansInsetWidth) {
  const auto r = RasterizeStrokes({{{{0, 0}, {255, 0}}}}, 64);
  int ink = 0;
  for (int row = 0; row < 64; ++row)
    for (int col = 0; col < 64; ++col)
      if (r.pixels[row * 64 + col] > 0) {
        ++ink;
        EXPECT_EQ(row, 31);
        EXPECT_GE(col, 2);
        EXPECT_LE(col, 61);
      }
  EXPECT_EQ(ink, 60);
}

TEST(RasterTest, EmptyDrawingIsFlaggedBackground) {
  const auto r = RasterizeStrokes({}, 64);
  EXPECT_TRUE(r.blank);
  EXPECT_EQ(r.pixels, std::vector<float>(64 * 64, -1.0f));
  EXPECT_THROW(RasterizeStrokes({{{}}}, 64), std::invalid_argument);
  EXPECT_THROW(RasterizeStrokes({}, 4), std::invalid_argument);
}

TEST(RasterTest, ScaleAndTranslationInvarianceOnRandomDrawings) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    StrokeDrawing d, scaled, moved;
    const int n_strokes = 1 + static_cast<int>(rng() % 4);
    for (int s = 0; s < n_strokes; ++s) {
      std::vector<StrokePoint> pts, pts2, pts3;
      const int n_pts = 1 + static_cast<int>(rng() % 6);
      for (int k = 0; k < n_pts; ++k) {
        const long long x = static_cast<long long>(rng() % 256);
        const long long y = static_cast<long long>(rng() % 256);
        pts.push_back({x, y});
        pts2.push_back({2 * x, 2 * y});
        pts3.push_back({x + 1000, y - 77});
      }
      d.strokes.push_back(pts);
      scaled.strokes.push_back(pts2);
      moved.strokes.push_back(pts3);
    }
    const int size = trial % 2 ? 64 : 28;
    const auto r = RasterizeStrokes(d, size);
    EXPECT_EQ(r.pixels, RasterizeStrokes(scaled, size).pixels) << trial;
    EXPECT_EQ(r.pixels, RasterizeStrokes(moved, size).pixels) << trial;
    for (float v : r.pixels) EXPECT_TRUE(v == 1.0f || v == -1.0f);
    // Ink stays inside the margin.
    for (int row = 0; row < size; ++row)
      for (int col = 0; col < size; ++col)
        if (r.pixels[row * size + col] > 0) {
          EXPECT_GE(std::min(row, col), kStrokeMargin);
          EXPECT_LT(std::max(row, col), size - kStrokeMargin);
        }
  }
}

TEST(StrokeRecordTest, ParsesSketchNdjson) {
  std::istringstream in(
      "{\"word\":\"power outlet\",\"countrycode\":\"GB\",\"recognized\":true,"
      "\"drawing\":[[[0,10.6,20],[5,5,5],[0,1,2]],[[3],[4]]]}\n"
      "\n"
      "{\"countrycode\":\"CA\",\"recognized\":false,\"drawing\":[]}\n");
  const auto recs = ReadStrokeRecords(in, "mem");
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].drawing.strokes[0][1], (StrokePoint{11, 5}));
  EXPECT_EQ(recs[0].drawing.strokes[1].size(), 1u);
  EXPECT_EQ(*recs[0].countrycode, "GB");
  EXPECT_FALSE(*recs[1].recognized);

  std::istringstream bad("{\"drawing\":[[[1,2],[3]]]}\n");
  try {
    ReadStrokeRecords(bad, "mem");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("mem:1"), std::string::npos);
  }
  EXPECT_THROW(ParseStrokeRecord("{\"drawing\": 3}"), DataError);
  EXPECT_THROW(ParseStrokeRecord("{oops"), DataError);
}

TEST(StrokeRecordTest, DatasetFiltersCountries) {
  std::vector<StrokeRecord> recs(4);
  recs[0] = {{{{{0, 0}, {9, 9}}}}, true, "CA"};
  recs[1] = {{{{{0, 0}, {9, 0}}}}, false, "GB"};
  recs[2] = {{{{{0, 0}, {9, 0}}}}, true, "US"};
  recs[3] = {{{{{0, 0}, {9, 0}}}}, std::nullopt, "GB"};
  const auto d = StrokeRecordsToDataset(recs, 32, "CA", "GB");
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.samples[0].c, 0);
  EXPECT_EQ(*d.samples[0].y_hard, 1);
  EXPECT_EQ(d.samples[1].c, 1);
  EXPECT_EQ(*d.samples[1].y_hard, 0);
  EXPECT_TRUE(ValidateDataset(d).empty());
}

// ---- outcome binarization --------------------------------------------------

TEST(BinarizeTest, ThresholdIsInclusive) {
  EXPECT_EQ(BinarizeOutcome(0.12, 0.12), 1);
  EXPECT_EQ(BinarizeOutcome(0.13, 0.12), 0);
  EXPECT_EQ(BinarizeOutcome(0.0, 0.5), 1);
  EXPECT_THROW(BinarizeOutcome(-0.01, 0.12), DataError);
  EXPECT_THROW(BinarizeOutcome(NAN, 0.12), DataError);
}

TEST(BinarizeTest, MonotoneNonIncreasingInRate) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 1000; ++i) {
    double a = u(rng), b = u(rng), t = u(rng);
    if (a > b) std::swap(a, b);
    EXPECT_GE(BinarizeOutcome(a, t), BinarizeOutcome(b, t));
  }
}

// ---- synthetic benchmark ---------------------------------------------------

TEST(SyntheticTest, EmptyAndDeterministic) {
  SyntheticBiasSpec spec;
  spec.n = 0;
  EXPECT_TRUE(SynthesizeBiasedDataset(spec).dataset.empty());
  spec.n = 50;
  spec.seed = 4;
  const auto a = SynthesizeBiasedDataset(spec);
  EXPECT_EQ(a.dataset, SynthesizeBiasedDataset(spec).dataset);
  spec.seed = 5;
  EXPECT_NE(a.dataset, SynthesizeBiasedDataset(spec).dataset);
  EXPECT_TRUE(ValidateDataset(a.dataset).empty());
}

TEST(SyntheticTest, AnalyticGroundTruth) {
  const auto t = AnalyticGroundTruth({});
  EXPECT_DOUBLE_EQ(t.groups[0].p_y1, (0.9 + 0.4) / 2);
  EXPECT_DOUBLE_EQ(t.groups[1].p_y1, (0.6 + 0.1) / 2);
  // Bayes rule predicts the square everywhere and the disc nowhere.
  EXPECT_EQ(t.bayes_rule[0][0], 1);
  EXPECT_EQ(t.bayes_rule[0][1], 1);
  EXPECT_EQ(t.bayes_rule[1][0], 0);
  EXPECT_EQ(t.bayes_rule[1][1], 0);
  EXPECT_NEAR(t.groups[0].error, 0.25, 1e-15);
  EXPECT_NEAR(t.groups[1].error, 0.25, 1e-15);
  EXPECT_NEAR(t.dp_gap, 0.0, 1e-15);
  EXPECT_NEAR(t.groups[0].fnr, 0.2 / 0.65, 1e-15);
  EXPECT_NEAR(t.groups[1].fnr, 0.05 / 0.35, 1e-15);
  EXPECT_NEAR(t.eo_gap, 0.2 / 0.65 - 0.05 / 0.35, 1e-15);
}

TEST(SyntheticTest, MarginalsMatchAnalyticValues) {
  SyntheticBiasSpec spec;
  spec.n = 20000;
  spec.image_size = 16;
  spec.seed = 11;
  const auto s = SynthesizeBiasedDataset(spec);
  double n[2] = {0, 0}, pos[2] = {0, 0};
  for (const auto& x : s.dataset.samples) {
    n[x.c] += 1;
    pos[x.c] += *x.y_hard;
  }
  EXPECT_NEAR(pos[0] / n[0], 0.65, 0.02);
  EXPECT_NEAR(pos[1] / n[1], 0.35, 0.02);
}

TEST(SyntheticTest, ConditionalFrequenciesConvergeAtRootN) {
  for (std::int64_t n : {1000, 10000}) {
    SyntheticBiasSpec spec;
    spec.n = n;
    spec.image_size = 16;
    spec.seed = 21;
    const auto s = SynthesizeBiasedDataset(spec);
    double cnt[2][2] = {}, pos[2][2] = {};
    for (std::size_t i = 0; i < s.dataset.size(); ++i) {
      const auto& x = s.dataset.samples[i];
      cnt[s.glyph[i]][x.c] += 1;
      pos[s.glyph[i]][x.c] += *x.y_hard;
    }
    for (int g = 0; g < 2; ++g)
      for (int c = 0; c < 2; ++c) {
        const double p = spec.p_y_given[g][c];
        const double se = std::sqrt(p * (1 - p) / cnt[g][c]);
        EXPECT_LE(std::abs(pos[g][c] / cnt[g][c] - p), 4 * se) << n << " " << g << c;
      }
  }
}

TEST(SyntheticTest, GlyphsAndMarkerAreVisible) {
  SyntheticBiasSpec spec;
  spec.n = 200;
  spec.noise_std = 0;
  spec.max_jitter = 0;
  const auto s = SynthesizeBiasedDataset(spec);
  const auto* sq = &s.dataset.samples[0];
  const AttributedSample* disc = nullptr;
  for (std::size_t i = 0; i < s.dataset.size(); ++i) {
    if (s.glyph[i] == 0 && s.dataset.samples[i].c == 0) sq = &s.dataset.samples[i];
    if (s.glyph[i] == 1 && s.dataset.samples[i].c == 0) disc = &s.dataset.samples[i];
  }
  ASSERT_NE(disc, nullptr);
  int differ = 0;
  for (std::size_t p = 0; p < sq->x.size(); ++p) differ += sq->x[p] != disc->x[p];
  EXPECT_GE(differ, 20);
  // Corner pixel carries the background band of c.
  for (const auto& x : s.dataset.samples) {
    EXPECT_FLOAT_EQ(x.x[0], static_cast<float>(spec.background_levels[x.c]));
  }
}

TEST(SyntheticTest, SpecJsonAndValidation) {
  SyntheticBiasSpec spec;
  spec.n = 7;
  const nlohmann::json j = spec;
  EXPECT_EQ(j.get<SyntheticBiasSpec>(), spec);
  auto bad = j;
  bad["p_y_given"][0][1] = 1.5;
  EXPECT_THROW(bad.get<SyntheticBiasSpec>(), ConfigError);
  bad = j;
  bad["colour"] = 1;
  EXPECT_THROW(bad.get<SyntheticBiasSpec>(), ConfigError);
  const nlohmann::json t = AnalyticGroundTruth(spec);
  EXPECT_DOUBLE_EQ(t["p_y1_given_c"][0].get<double>(), 0.65);
}

}  // namespace
}  // namespace fairgan::data
