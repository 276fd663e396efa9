// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_DATA_STROKES_H_
#define FAIRGAN_DATA_STROKES_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fairgan/core/dataset.h"

namespace fairgan::data {

struct StrokePoint {
  long long x = 0;
  long long y = 0;
  bool operator==(const StrokePoint&) const = default;
};

// Polylines in a source coordinate box; y grows downward.
struct StrokeDrawing {
  std::vector<std::vector<StrokePoint>> strokes;
  bool operator==(const StrokeDrawing&) const = default;
};

struct Raster {
  int size = 0;
  std::vector<float> pixels;  // row-major, ink +1 on background -1
  bool blank = false;         // set for drawings without strokes
};

inline constexpr int kStrokeMargin = 2;

// Fits the drawing's bounding box into out_size with a 2-pixel margin,
// keeping the aspect ratio and centering the shorter axis, then draws
// 1-pixel integer line segments. Coordinates map as
//   margin + offset + round_half_up((v - v_min) * (out_size - 1 - 2 * margin) / extent),
// extent being the larger bounding-box side. A degenerate box maps to the
// center pixel. Throws std::invalid_argument on empty strokes or out_size < 5.
Raster RasterizeStrokes(const StrokeDrawing& drawing, int out_size);

// One line of a sketch-dataset ndjson file. Only `drawing`, `recognized` and
// `countrycode` are read; each stroke is [[x...], [y...]] with optional
// trailing timing arrays, which are ignored.
struct StrokeRecord {
  StrokeDrawing drawing;
  std::optional<bool> recognized;
  std::optional<std::string> countrycode;
};

StrokeRecord ParseStrokeRecord(const std::string& line);
// Skips blank lines. Errors name the line number.
std::vector<StrokeRecord> ReadStrokeRecords(std::istream& in, const std::string& source);
std::vector<StrokeRecord> ReadStrokeRecordsFile(const std::string& path);

// Rasterizes records whose countrycode is one of the two given codes
// (c = 0 for country0, c = 1 for country1) with y = recognized. Other records
// and records without `recognized` are skipped; the number skipped is logged.
AttributedDataset StrokeRecordsToDataset(const std::vector<StrokeRecord>& records,
                                         int out_size, const std::string& country0,
                                         const std::string& country1);

}  // namespace fairgan::data

#endif  // FAIRGAN_DATA_STROKES_H_
