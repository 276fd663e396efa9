// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include "fairgan/data/synthetic.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "fairgan/core/errors.h"
#include "fairgan/core/json_fields.h"

namespace fairgan::data {
namespace {

void Check(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("synthetic spec: " + what);
}

bool IsProbability(double p) { return p >= 0 && p <= 1; }

double Ratio(double num, double den) {
  return den > 0 ? num / den : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

void SyntheticBiasSpec::Validate() const {
  Check(n >= 0, "n must be >= 0");
  Check(image_size >= 16, "image_size must be >= 16 for distinguishable glyphs");
  Check(IsProbability(p_c), "p_c must lie in [0, 1]");
  for (const auto& row : p_y_given)
    for (double p : row) Check(IsProbability(p), "p_y_given entries must lie in [0, 1]");
  for (double b : background_levels) Check(b >= -1 && b <= 1, "background levels in [-1, 1]");
  Check(background_levels[0] != background_levels[1], "background levels must differ");
  Check(ink_level >= -1 && ink_level <= 1, "ink_level must lie in [-1, 1]");
  Check(noise_std >= 0 && std::isfinite(noise_std), "noise_std must be >= 0");
  Check(max_jitter >= 0 && max_jitter <= image_size / 8, "max_jitter must lie in [0, size/8]");
}

GroundTruth AnalyticGroundTruth(const SyntheticBiasSpec& spec) {
  spec.Validate();
  GroundTruth t;
  for (int g = 0; g < 2; ++g)
    for (int c = 0; c < 2; ++c) t.bayes_rule[g][c] = spec.p_y_given[g][c] > 0.5 ? 1 : 0;
  for (int c = 0; c < 2; ++c) {
    double p_y1 = 0, pos = 0, err = 0, fn = 0, fp = 0;
    for (int g = 0; g < 2; ++g) {
      const double p = spec.p_y_given[g][c];
      const int r = t.bayes_rule[g][c];
      p_y1 += 0.5 * p;
      pos += 0.5 * r;
      err += 0.5 * (r ? 1 - p : p);
      fn += 0.5 * p * (1 - r);
      fp += 0.5 * (1 - p) * r;
    }
    t.groups[c] = {p_y1, pos, err, Ratio(fn, p_y1), Ratio(fp, 1 - p_y1)};
  }
  t.dp_gap = std::abs(t.groups[0].error - t.groups[1].error);
  t.eo_gap = std::abs(t.groups[0].fnr - t.groups[1].fnr);
  t.positive_rate_gap = std::abs(t.groups[0].positive_rate - t.groups[1].positive_rate);
  return t;
}

SyntheticDataset SynthesizeBiasedDataset(const SyntheticBiasSpec& spec) {
  spec.Validate();
  SyntheticDataset out;
  out.truth = AnalyticGroundTruth(spec);
  const int s = spec.image_size;
  out.dataset.image_shape = {1, s, s};
  out.dataset.outcome_labeled = true;
  out.dataset.samples.reserve(static_cast<std::size_t>(spec.n));
  out.glyph.reserve(static_cast<std::size_t>(spec.n));

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> jitter(-spec.max_jitter, spec.max_jitter);
  std::normal_distribution<double> noise(0.0, spec.noise_std);
  const double half = s / 4.0;
  for (std::int64_t i = 0; i < spec.n; ++i) {
    AttributedSample sample;
    sample.c = unit(rng) < spec.p_c ? 1 : 0;
    const int glyph = unit(rng) < 0.5 ? 0 : 1;
    sample.y_hard = unit(rng) < spec.p_y_given[glyph][sample.c] ? 1 : 0;
    const double cx = (s - 1) / 2.0 + jitter(rng);
    const double cy = (s - 1) / 2.0 + jitter(rng);
    sample.x.resize(static_cast<std::size_t>(s) * s);
    for (int r = 0; r < s; ++r) {
      for (int q = 0; q < s; ++q) {
        const double dx = q - cx, dy = r - cy;
        const bool ink = glyph == 0
                             ? std::abs(dx) <= half - 0.5 && std::abs(dy) <= half - 0.5
                             : dx * dx + dy * dy <= half * half;
        double v = ink ? spec.ink_level : spec.background_levels[sample.c];
        if (spec.noise_std > 0) v += noise(rng);
        sample.x[static_cast<std::size_t>(r) * s + q] =
            static_cast<float>(std::clamp(v, -1.0, 1.0));
      }
    }
    out.dataset.samples.push_back(std::move(sample));
    out.glyph.push_back(glyph);
  }
  return out;
}

void to_json(nlohmann::json& j, const SyntheticBiasSpec& s) {
  j = {{"n", s.n},
       {"image_size", s.image_size},
       {"p_c", s.p_c},
       {"p_y_given", s.p_y_given},
       {"background_levels", s.background_levels},
       {"ink_level", s.ink_level},
       {"noise_std", s.noise_std},
       {"max_jitter", s.max_jitter},
       {"seed", s.seed}};
}

void from_json(const nlohmann::json& j, SyntheticBiasSpec& s) {
  RejectUnknownKeys(j,
                    {"n", "image_size", "p_c", "p_y_given", "background_levels", "ink_level",
                     "noise_std", "max_jitter", "seed"},
                    "synthetic");
  ReadField(j, "n", s.n);
  ReadField(j, "image_size", s.image_size);
  ReadField(j, "p_c", s.p_c);
  ReadField(j, "p_y_given", s.p_y_given);
  ReadField(j, "background_levels", s.background_levels);
  ReadField(j, "ink_level", s.ink_level);
  ReadField(j, "noise_std", s.noise_std);
  ReadField(j, "max_jitter", s.max_jitter);
  ReadField(j, "seed", s.seed);
  s.Validate();
}

void to_json(nlohmann::json& j, const GroundTruth& t) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
  auto group = [&](const GroupRates& g) {
    return nlohmann::json{{"p_y1", num(g.p_y1)},
                          {"positive_rate", num(g.positive_rate)},
                          {"error", num(g.error)},
                          {"fnr", num(g.fnr)},
                          {"fpr", num(g.fpr)}};
  };
  j = {{"p_y1_given_c", {num(t.groups[0].p_y1), num(t.groups[1].p_y1)}},
       {"bayes",
        {{"rule_by_glyph_c", t.bayes_rule},
         {"group0", group(t.groups[0])},
         {"group1", group(t.groups[1])},
         {"dp_gap", num(t.dp_gap)},
         {"eo_gap", num(t.eo_gap)},
         {"positive_rate_gap", num(t.positive_rate_gap)}}}};
}

}  // namespace fairgan::data
