// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_CORE_DATASET_H_
#define FAIRGAN_CORE_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fairgan {

// (channels, height, width). Pixel storage is always CHW, row-major.
struct ImageShape {
  int channels = 1;
  int height = 0;
  int width = 0;

  std::size_t size() const {
    return static_cast<std::size_t>(channels) * height * width;
  }
  bool operator==(const ImageShape&) const = default;
  std::string ToString() const;
};

// One record: feature image x in [-1, 1], protected attribute c, and the
// allocative outcome in hard (bit) and softened (continuous) forms.
struct AttributedSample {
  std::vector<float> x;
  int c = 0;
  std::optional<int> y_hard;
  std::optional<float> y_soft;

  bool operator==(const AttributedSample&) const = default;
};

// Sample order is part of the dataset identity.
struct AttributedDataset {
  ImageShape image_shape;
  std::vector<AttributedSample> samples;
  // False for an auxiliary pool that carries no outcome labels.
  bool outcome_labeled = true;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  bool operator==(const AttributedDataset&) const = default;
};

// Generator loss composition.
enum class FairnessObjective { kNone, kDp, kEo };

std::string_view ToString(FairnessObjective objective);
// Accepts "none", "dp", "eo" (case-insensitive). Throws on anything else.
FairnessObjective ParseFairnessObjective(std::string_view text);

// Maps an 8-bit pixel to [-1, 1].
inline float PixelToUnit(std::uint8_t v) { return v / 127.5f - 1.0f; }
std::uint8_t UnitToPixel(float v);

// Subset of `dataset` at `indices`, in the given order.
AttributedDataset Subset(const AttributedDataset& dataset,
                         const std::vector<std::size_t>& indices);

// SHA-256 hex digest over the dataset's shape, flags and sample contents.
std::string DatasetDigest(const AttributedDataset& dataset);

}  // namespace fairgan

#endif  // FAIRGAN_CORE_DATASET_H_
