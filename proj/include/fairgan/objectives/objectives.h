// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_OBJECTIVES_OBJECTIVES_H_
#define FAIRGAN_OBJECTIVES_OBJECTIVES_H_

#include <array>
#include <span>
#include <string>
#include <string_view>

#include "fairgan/core/dataset.h"
#include "fairgan/nn/discriminator.h"
#include "fairgan/nn/tape.h"

// Discriminator and generator objectives, both stated as minimizations.
//
// Every objective is written as a sum of log-likelihoods to be maximized;
// here each log-likelihood is replaced by a minimization surrogate:
//
//   field        likelihood term        surrogate (minimized)
//   l_sj_real    L_SJ^R  (joint head)   D: mean max(0, 1 - s_joint(real))
//   l_sj_fake    L_SJ^F  (joint head)   D: mean max(0, 1 + s_joint(fake))
//                                       G: -mean s_joint(fake)
//   l_sx_real    L_SX^R  (image head)   D: mean max(0, 1 - s_x(real))
//   l_sx_fake    L_SX^F  (image head)   D: mean max(0, 1 + s_x(fake))
//                                       G: -mean s_x(fake)
//   l_c_real     L_C^R   (P(C|X))       D: CE(c | x_real)
//   l_c_fake     L_C^F   (P(C|X))       G: CE(c | x_fake); D: 0
//   l_dp_real    L_DP^R  (P(C|Y))       D: CE(c | y_real), labeled only
//   l_dp_fake    L_DP^F  (P(C|Y))       G: -CE(c | y_fake), gated for EO;
//                                          D: 0
//
// A non-finite component raises NumericError.
//
// CE is the negated log-likelihood, so the generator's -L_C^F becomes +CE and
// its +L_DP^F becomes -CE. Components hold the signed contributions and
//   total = sum_i weight_i * component_i
// in the field order above. With uniform_target the l_dp_fake entry is the
// (positive) cross-entropy toward the uniform class distribution instead.
namespace fairgan::objectives {

struct LossBreakdown {
  double l_sj_real = 0;
  double l_sj_fake = 0;
  double l_sx_real = 0;
  double l_sx_fake = 0;
  double l_c_real = 0;
  double l_c_fake = 0;
  double l_dp_real = 0;
  double l_dp_fake = 0;
  double total = 0;

  std::array<double, 8> Components() const;
  // sum_i weights[i] * Components()[i].
  double WeightedSum(const std::array<double, 8>& weights) const;
};

inline constexpr std::array<const char*, 8> kComponentNames = {
    "l_sj_real", "l_sj_fake", "l_sx_real", "l_sx_fake",
    "l_c_real",  "l_c_fake",  "l_dp_real", "l_dp_fake"};

struct ObjectiveOptions {
  // Per-component weights in LossBreakdown field order.
  std::array<double, 8> weights = {1, 1, 1, 1, 1, 1, 1, 1};
  bool uniform_target = false;
  // Softened positive outcome; maps to gate weight 1.
  double gate_magnitude = 0.8;
};

// Graph-level result: `total` is a [1] tape value to call Backward() on.
struct ObjectiveValue {
  nn::Var total;
  LossBreakdown breakdown;
};

// `real_unlabeled` may be null or describe an empty batch. `c_labels` covers
// the labeled rows followed by the unlabeled rows; `fairness_head_labels`
// covers the labeled rows only.
template <typename T>
ObjectiveValue DiscriminatorObjective(nn::Tape<T>& tape,
                                      const nn::DiscriminatorOutputs& real_labeled,
                                      const nn::DiscriminatorOutputs* real_unlabeled,
                                      const nn::DiscriminatorOutputs& fake,
                                      std::span<const int> c_labels,
                                      std::span<const int> fairness_head_labels,
                                      const ObjectiveOptions& options = {});

// `c_labels` are the classes the fake batch was conditioned on. `y_fake` [N]
// is required for kEo and ignored otherwise.
template <typename T>
ObjectiveValue GeneratorObjective(nn::Tape<T>& tape, const nn::DiscriminatorOutputs& fake,
                                  std::span<const int> c_labels, nn::Var y_fake,
                                  FairnessObjective objective,
                                  const ObjectiveOptions& options = {});

// Rows [begin, end) of every head.
template <typename T>
nn::DiscriminatorOutputs SliceOutputs(nn::Tape<T>& tape, const nn::DiscriminatorOutputs& out,
                                      int begin, int end);

// Loss log: tab-separated with columns
//   step, net, the eight components, total, lr
// where net is "D" or "G"; each training step appends one row per network.
std::string LossLogHeader();
std::string LossLogRow(long long step, std::string_view net, const LossBreakdown& breakdown,
                       double lr);

}  // namespace fairgan::objectives

#endif  // FAIRGAN_OBJECTIVES_OBJECTIVES_H_
