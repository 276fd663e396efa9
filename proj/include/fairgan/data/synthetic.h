// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_DATA_SYNTHETIC_H_
#define FAIRGAN_DATA_SYNTHETIC_H_

#include <array>
#include <cstdint>

#include "fairgan/core/dataset.h"
#include "json.hpp"

namespace fairgan::data {

// Glyph 0 is a filled square, glyph 1 a filled disc of the same half-width.
// The protected attribute is painted into the background band: c = 0 rows
// sit at background_levels[0], c = 1 at background_levels[1].
struct SyntheticBiasSpec {
  std::int64_t n = 2000;
  int image_size = 32;
  double p_c = 0.5;
  // p_y_given[glyph][c] = P(Y = 1 | glyph, C = c).
  std::array<std::array<double, 2>, 2> p_y_given = {{{0.9, 0.6}, {0.4, 0.1}}};
  std::array<double, 2> background_levels = {-0.8, -0.3};
  double ink_level = 0.8;
  double noise_std = 0.1;
  // Glyph centers jitter uniformly by up to this many pixels on each axis.
  int max_jitter = 2;
  std::uint64_t seed = 0;

  // Throws ConfigError. Requires image_size >= 16 so the glyphs differ by
  // whole pixels, and distinct background levels.
  void Validate() const;
  bool operator==(const SyntheticBiasSpec&) const = default;
};

// Per-group rates of the Bayes-optimal classifier that sees glyph and c
// exactly (they are recoverable from X by construction).
struct GroupRates {
  double p_y1 = 0;            // P(Y = 1 | C)
  double positive_rate = 0;   // P(Yhat = 1 | C)
  double error = 0;
  double fnr = 0;
  double fpr = 0;
};

struct GroundTruth {
  std::array<GroupRates, 2> groups;
  double dp_gap = 0;  // |error_0 - error_1|
  double eo_gap = 0;  // |fnr_0 - fnr_1|
  // Parity of positive prediction rates, for comparison with the error form.
  double positive_rate_gap = 0;
  // Bayes rule per (glyph, c): predict 1 iff P(Y = 1 | glyph, c) > 0.5.
  std::array<std::array<int, 2>, 2> bayes_rule{};
};

GroundTruth AnalyticGroundTruth(const SyntheticBiasSpec& spec);

struct SyntheticDataset {
  AttributedDataset dataset;
  std::vector<int> glyph;  // per sample, for diagnostics
  GroundTruth truth;
};

// Per sample: c ~ Bernoulli(p_c), glyph uniform, y ~ Bernoulli(p_y_given[glyph][c]),
// then renders the glyph over the c band with N(0, noise_std^2) pixel noise
// clamped to [-1, 1].
SyntheticDataset SynthesizeBiasedDataset(const SyntheticBiasSpec& spec);

void to_json(nlohmann::json& j, const SyntheticBiasSpec& s);
void from_json(const nlohmann::json& j, SyntheticBiasSpec& s);
void to_json(nlohmann::json& j, const GroundTruth& t);

}  // namespace fairgan::data

#endif  // FAIRGAN_DATA_SYNTHETIC_H_
