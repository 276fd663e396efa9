// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_TRAINING_CONFIG_H_
#define FAIRGAN_TRAINING_CONFIG_H_

#include <array>
#include <cstdint>

#include "fairgan/core/dataset.h"
#include "fairgan/nn/specs.h"
#include "fairgan/objectives/objectives.h"
#include "json.hpp"

namespace fairgan::training {

struct TrainConfig {
  double lr_init = 2e-4;
  double beta1 = 0.0;
  double beta2 = 0.9;
  double adam_eps = 1e-8;
  std::int64_t total_steps = 20000;
  int batch_size = 64;
  int d_steps_per_g_step = 1;
  FairnessObjective objective = FairnessObjective::kDp;
  double soften_magnitude = 0.8;
  double y_noise_std = 0.01;
  std::uint64_t seed = 0;
  // Fraction of each real batch drawn from the unlabeled pool; 0 disables
  // the semi-supervised terms.
  double unlabeled_mix_fraction = 0.0;
  // 0 writes only the initial and final checkpoints.
  std::int64_t checkpoint_every = 1000;
  // Loss composition; see objectives.h.
  std::array<double, 8> loss_weights = {1, 1, 1, 1, 1, 1, 1, 1};
  bool uniform_target = false;
  // Consecutive non-finite steps tolerated before the run fails.
  int max_consecutive_aborts = 50;

  void Validate() const;
  objectives::ObjectiveOptions Objective() const;
  bool operator==(const TrainConfig&) const = default;
};

struct ModelSpecs {
  nn::GeneratorSpec generator;
  nn::DiscriminatorSpec discriminator;

  // Both networks must agree on image shape and class count.
  void Validate() const;
  bool operator==(const ModelSpecs&) const = default;
};

void to_json(nlohmann::json& j, const TrainConfig& cfg);
// Missing keys keep their defaults; unknown keys are rejected.
void from_json(const nlohmann::json& j, TrainConfig& cfg);
void to_json(nlohmann::json& j, const ModelSpecs& specs);
void from_json(const nlohmann::json& j, ModelSpecs& specs);

}  // namespace fairgan::training

#endif  // FAIRGAN_TRAINING_CONFIG_H_
