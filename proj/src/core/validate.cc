// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include "fairgan/core/validate.h"

#include <cmath>

namespace fairgan {

std::string ToString(InvariantKind kind) {
  switch (kind) {
    case InvariantKind::kPixelRange:
      return "pixel value outside [-1, 1]";
    case InvariantKind::kShapeMismatch:
      return "image size does not match image_shape";
    case InvariantKind::kAttributeRange:
      return "protected attribute outside {0, 1}";
    case InvariantKind::kOutcomeRange:
      return "outcome outside {0, 1}";
    case InvariantKind::kMissingOutcome:
      return "outcome missing in an outcome-labeled dataset";
    case InvariantKind::kSoftWithoutHard:
      return "soft outcome present without hard outcome";
    case InvariantKind::kSoftRange:
      return "soft outcome outside (-1, 1)";
    case InvariantKind::kNonFinite:
      return "non-finite value";
  }
  return "unknown";
}

std::vector<Violation> ValidateDataset(const AttributedDataset& dataset) {
  std::vector<Violation> out;
  const auto& shape = dataset.image_shape;
  if (shape.channels <= 0 || shape.height <= 0 || shape.width <= 0) {
    out.push_back({std::nullopt, InvariantKind::kShapeMismatch,
                   "non-positive image_shape " + shape.ToString()});
  }
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& s = dataset.samples[i];
    auto add = [&](InvariantKind kind, std::string detail) {
      out.push_back({i, kind, std::move(detail)});
    };
    if (s.x.size() != shape.size()) {
      add(InvariantKind::kShapeMismatch,
          "has " + std::to_string(s.x.size()) + " values, expected " +
              std::to_string(shape.size()));
    }
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      const float v = s.x[k];
      if (!std::isfinite(v)) {
        add(InvariantKind::kNonFinite, "x[" + std::to_string(k) + "]");
        break;
      }
      if (v < -1.0f || v > 1.0f) {
        add(InvariantKind::kPixelRange,
            "x[" + std::to_string(k) + "] = " + std::to_string(v));
        break;
      }
    }
    if (s.c != 0 && s.c != 1) {
      add(InvariantKind::kAttributeRange, "c = " + std::to_string(s.c));
    }
    if (s.y_hard && *s.y_hard != 0 && *s.y_hard != 1) {
      add(InvariantKind::kOutcomeRange, "y = " + std::to_string(*s.y_hard));
    }
    if (dataset.outcome_labeled && !s.y_hard) {
      add(InvariantKind::kMissingOutcome, "y_hard absent");
    }
    if (s.y_soft) {
      if (!s.y_hard) add(InvariantKind::kSoftWithoutHard, "y_soft without y_hard");
      if (!std::isfinite(*s.y_soft) || *s.y_soft <= -1.0f || *s.y_soft >= 1.0f) {
        add(InvariantKind::kSoftRange, "y_soft = " + std::to_string(*s.y_soft));
      }
    }
  }
  return out;
}

}  // namespace fairgan
