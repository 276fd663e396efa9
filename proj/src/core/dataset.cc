// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include "fairgan/core/dataset.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fairgan/core/digest.h"

namespace fairgan {

std::string ImageShape::ToString() const {
  return "(" + std::to_string(channels) + "," + std::to_string(height) + "," +
         std::to_string(width) + ")";
}

std::string_view ToString(FairnessObjective objective) {
  switch (objective) {
    case FairnessObjective::kNone:
      return "none";
    case FairnessObjective::kDp:
      return "dp";
    case FairnessObjective::kEo:
      return "eo";
  }
  return "none";
}

FairnessObjective ParseFairnessObjective(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  if (lower == "none") return FairnessObjective::kNone;
  if (lower == "dp") return FairnessObjective::kDp;
  if (lower == "eo") return FairnessObjective::kEo;
  throw std::invalid_argument("unknown fairness objective '" +
                              std::string(text) + "' (expected none|dp|eo)");
}

std::uint8_t UnitToPixel(float v) {
  const float scaled = std::round((std::clamp(v, -1.0f, 1.0f) + 1.0f) * 127.5f);
  return static_cast<std::uint8_t>(std::clamp(scaled, 0.0f, 255.0f));
}

AttributedDataset Subset(const AttributedDataset& dataset,
                         const std::vector<std::size_t>& indices) {
  AttributedDataset out;
  out.image_shape = dataset.image_shape;
  out.outcome_labeled = dataset.outcome_labeled;
  out.samples.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= dataset.size()) throw std::out_of_range("subset index");
    out.samples.push_back(dataset.samples[i]);
  }
  return out;
}

std::string DatasetDigest(const AttributedDataset& dataset) {
  Sha256 h;
  h.UpdateValue(dataset.image_shape.channels);
  h.UpdateValue(dataset.image_shape.height);
  h.UpdateValue(dataset.image_shape.width);
  h.UpdateValue(static_cast<std::uint8_t>(dataset.outcome_labeled));
  const std::uint64_t n = dataset.size();
  h.UpdateValue(n);
  for (const auto& s : dataset.samples) {
    h.Update(s.x.data(), s.x.size() * sizeof(float));
    h.UpdateValue(s.c);
    h.UpdateValue(s.y_hard.value_or(-1));
    h.UpdateValue(static_cast<std::uint8_t>(s.y_soft.has_value()));
    h.UpdateValue(s.y_soft.value_or(0.0f));
  }
  return h.HexDigest();
}

}  // namespace fairgan
