// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include "fairgan/data/strokes.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <stdexcept>

#include "fairgan/core/errors.h"
#include "json.hpp"

namespace fairgan::data {
namespace {

// round(a / b) with ties up, for a >= 0, b > 0.
long long RoundHalfUp(long long a, long long b) { return (2 * a + b) / (2 * b); }

void Plot(Raster& r, long long x, long long y) {
  r.pixels[static_cast<std::size_t>(y) * r.size + static_cast<std::size_t>(x)] = 1.0f;
}

// Steps along the major axis; the minor offset after k steps is
// round_half_up(k * |d_minor| / n), tracked with an integer accumulator.
void DrawLine(Raster& r, StrokePoint a, StrokePoint b) {
  const long long dx = b.x - a.x, dy = b.y - a.y;
  const long long n = std::max(std::llabs(dx), std::llabs(dy));
  if (n == 0) {
    Plot(r, a.x, a.y);
    return;
  }
  const bool x_major = std::llabs(dx) >= std::llabs(dy);
  const long long minor_abs = x_major ? std::llabs(dy) : std::llabs(dx);
  const long long s_major = (x_major ? dx : dy) > 0 ? 1 : -1;
  const long long s_minor = (x_major ? dy : dx) >= 0 ? 1 : -1;
  long long major = x_major ? a.x : a.y;
  long long minor = x_major ? a.y : a.x;
  long long acc = n;  // 2 * k * minor_abs + n, minus 2n per minor step taken
  for (long long k = 0; k <= n; ++k) {
    if (x_major) {
      Plot(r, major, minor);
    } else {
      Plot(r, minor, major);
    }
    major += s_major;
    acc += 2 * minor_abs;
    while (acc >= 2 * n) {
      acc -= 2 * n;
      minor += s_minor;
    }
  }
}

long long ReadCoordinate(const nlohmann::json& v) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (!std::isfinite(d) || std::abs(d) > 1e15) throw DataError("coordinate out of range");
    return std::llround(d);
  }
  throw DataError("stroke coordinate is not a number");
}

}  // namespace

Raster RasterizeStrokes(const StrokeDrawing& drawing, int out_size) {
  if (out_size < 2 * kStrokeMargin + 1) {
    throw std::invalid_argument("rasterize: out_size must be >= " +
                                std::to_string(2 * kStrokeMargin + 1));
  }
  Raster r;
  r.size = out_size;
  r.pixels.assign(static_cast<std::size_t>(out_size) * out_size, -1.0f);
  if (drawing.strokes.empty()) {
    r.blank = true;
    return r;
  }
  long long min_x = std::numeric_limits<long long>::max(), min_y = min_x;
  long long max_x = std::numeric_limits<long long>::min(), max_y = max_x;
  for (const auto& stroke : drawing.strokes) {
    if (stroke.empty()) throw std::invalid_argument("rasterize: stroke without points");
    for (const auto& p : stroke) {
      min_x = std::min(min_x, p.x);
      max_x = std::max(max_x, p.x);
      min_y = std::min(min_y, p.y);
      max_y = std::max(max_y, p.y);
    }
  }
  const long long avail = out_size - 1 - 2 * kStrokeMargin;
  const long long extent = std::max(max_x - min_x, max_y - min_y);
  if (extent > (1LL << 40)) throw std::invalid_argument("rasterize: coordinate box too large");
  auto map_axis = [&](long long v, long long lo, long long span) {
    if (extent == 0) return kStrokeMargin + avail / 2;
    const long long offset = (avail - RoundHalfUp(span * avail, extent)) / 2;
    return kStrokeMargin + offset + RoundHalfUp((v - lo) * avail, extent);
  };
  for (const auto& stroke : drawing.strokes) {
    std::vector<StrokePoint> px;
    px.reserve(stroke.size());
    for (const auto& p : stroke) {
      px.push_back({map_axis(p.x, min_x, max_x - min_x), map_axis(p.y, min_y, max_y - min_y)});
    }
    if (px.size() == 1) DrawLine(r, px[0], px[0]);
    for (std::size_t i = 1; i < px.size(); ++i) DrawLine(r, px[i - 1], px[i]);
  }
  return r;
}

StrokeRecord ParseStrokeRecord(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("drawing")) throw DataError("record without 'drawing'");
  const auto& d = j.at("drawing");
  if (!d.is_array()) throw DataError("'drawing' must be an array of strokes");
  StrokeRecord rec;
  for (const auto& stroke : d) {
    if (!stroke.is_array() || stroke.size() < 2 || !stroke[0].is_array() ||
        !stroke[1].is_array() || stroke[0].size() != stroke[1].size()) {
      throw DataError("stroke must be [[x...], [y...]] with equal lengths");
    }
    if (stroke[0].empty()) throw DataError("stroke without points");
    std::vector<StrokePoint> pts;
    for (std::size_t i = 0; i < stroke[0].size(); ++i) {
      pts.push_back({ReadCoordinate(stroke[0][i]), ReadCoordinate(stroke[1][i])});
    }
    rec.drawing.strokes.push_back(std::move(pts));
  }
  if (j.contains("recognized") && !j.at("recognized").is_null()) {
    if (!j.at("recognized").is_boolean()) throw DataError("'recognized' must be a boolean");
    rec.recognized = j.at("recognized").get<bool>();
  }
  if (j.contains("countrycode") && j.at("countrycode").is_string()) {
    rec.countrycode = j.at("countrycode").get<std::string>();
  }
  return rec;
}

std::vector<StrokeRecord> ReadStrokeRecords(std::istream& in, const std::string& source) {
  std::vector<StrokeRecord> out;
  std::string line;
  for (long long no = 1; std::getline(in, line); ++no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(ParseStrokeRecord(line));
    } catch (const DataError& e) {
      throw DataError(source + ":" + std::to_string(no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<StrokeRecord> ReadStrokeRecordsFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open");
  return ReadStrokeRecords(in, path);
}

AttributedDataset StrokeRecordsToDataset(const std::vector<StrokeRecord>& records,
                                         int out_size, const std::string& country0,
                                         const std::string& country1) {
  if (country0 == country1) throw ConfigError("the two country codes must differ");
  AttributedDataset out;
  out.image_shape = {1, out_size, out_size};
  std::size_t skipped = 0, blank = 0;
  for (const auto& rec : records) {
    if (!rec.countrycode || !rec.recognized ||
        (*rec.countrycode != country0 && *rec.countrycode != country1)) {
      ++skipped;
      continue;
    }
    auto raster = RasterizeStrokes(rec.drawing, out_size);
    blank += raster.blank;
    AttributedSample s;
    s.x = std::move(raster.pixels);
    s.c = *rec.countrycode == country1 ? 1 : 0;
    s.y_hard = *rec.recognized ? 1 : 0;
    out.samples.push_back(std::move(s));
  }
  if (skipped) spdlog::info("rasterize: skipped {} of {} records", skipped, records.size());
  if (blank) spdlog::warn("rasterize: {} drawings without strokes rendered blank", blank);
  return out;
}

}  // namespace fairgan::data
