// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include "fairgan/training/config.h"

#include <set>
#include <stdexcept>
#include <string>

#include "fairgan/core/json_fields.h"

namespace fairgan::training {
namespace {

void Check(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("train config: " + what);
}

}  // namespace

void TrainConfig::Validate() const {
  Check(lr_init > 0, "lr_init must be > 0");
  Check(beta1 >= 0 && beta1 < 1, "beta1 must lie in [0, 1)");
  Check(beta2 >= 0 && beta2 < 1, "beta2 must lie in [0, 1)");
  Check(adam_eps > 0, "adam_eps must be > 0");
  Check(total_steps >= 0, "total_steps must be >= 0");
  Check(batch_size >= 1, "batch_size must be >= 1");
  Check(d_steps_per_g_step >= 1, "d_steps_per_g_step must be >= 1");
  Check(soften_magnitude > 0 && soften_magnitude < 1, "soften_magnitude must lie in (0, 1)");
  Check(y_noise_std >= 0, "y_noise_std must be >= 0");
  Check(unlabeled_mix_fraction >= 0 && unlabeled_mix_fraction <= 1,
        "unlabeled_mix_fraction must lie in [0, 1]");
  Check(checkpoint_every >= 0, "checkpoint_every must be >= 0");
  Check(max_consecutive_aborts >= 1, "max_consecutive_aborts must be >= 1");
}

objectives::ObjectiveOptions TrainConfig::Objective() const {
  objectives::ObjectiveOptions o;
  o.weights = loss_weights;
  o.uniform_target = uniform_target;
  o.gate_magnitude = soften_magnitude;
  return o;
}

void ModelSpecs::Validate() const {
  generator.Validate();
  discriminator.Validate();
  if (!(generator.image_shape == discriminator.image_shape)) {
    throw std::invalid_argument("model: generator and discriminator image shapes differ");
  }
  if (generator.num_classes != discriminator.num_classes) {
    throw std::invalid_argument("model: generator and discriminator class counts differ");
  }
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {{"lr_init", c.lr_init},
       {"beta1", c.beta1},
       {"beta2", c.beta2},
       {"adam_eps", c.adam_eps},
       {"total_steps", c.total_steps},
       {"batch_size", c.batch_size},
       {"d_steps_per_g_step", c.d_steps_per_g_step},
       {"objective", std::string(ToString(c.objective))},
       {"soften_magnitude", c.soften_magnitude},
       {"y_noise_std", c.y_noise_std},
       {"seed", c.seed},
       {"unlabeled_mix_fraction", c.unlabeled_mix_fraction},
       {"checkpoint_every", c.checkpoint_every},
       {"loss_weights", c.loss_weights},
       {"uniform_target", c.uniform_target},
       {"max_consecutive_aborts", c.max_consecutive_aborts}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  RejectUnknownKeys(j,
                {"lr_init", "beta1", "beta2", "adam_eps", "total_steps", "batch_size",
                 "d_steps_per_g_step", "objective", "soften_magnitude", "y_noise_std", "seed",
                 "unlabeled_mix_fraction", "checkpoint_every", "loss_weights",
                 "uniform_target", "max_consecutive_aborts"},
                "train");
  ReadField(j, "lr_init", c.lr_init);
  ReadField(j, "beta1", c.beta1);
  ReadField(j, "beta2", c.beta2);
  ReadField(j, "adam_eps", c.adam_eps);
  ReadField(j, "total_steps", c.total_steps);
  ReadField(j, "batch_size", c.batch_size);
  ReadField(j, "d_steps_per_g_step", c.d_steps_per_g_step);
  if (j.contains("objective")) {
    c.objective = ParseFairnessObjective(j.at("objective").get<std::string>());
  }
  ReadField(j, "soften_magnitude", c.soften_magnitude);
  ReadField(j, "y_noise_std", c.y_noise_std);
  ReadField(j, "seed", c.seed);
  ReadField(j, "unlabeled_mix_fraction", c.unlabeled_mix_fraction);
  ReadField(j, "checkpoint_every", c.checkpoint_every);
  ReadField(j, "loss_weights", c.loss_weights);
  ReadField(j, "uniform_target", c.uniform_target);
  ReadField(j, "max_consecutive_aborts", c.max_consecutive_aborts);
  c.Validate();
}

void to_json(nlohmann::json& j, const ModelSpecs& s) {
  j = {{"generator", s.generator}, {"discriminator", s.discriminator}};
}

void from_json(const nlohmann::json& j, ModelSpecs& s) {
  RejectUnknownKeys(j, {"generator", "discriminator", "image_shape", "num_classes"}, "model");
  // Shared fields may be given once at the top level.
  nlohmann::json g = j.value("generator", nlohmann::json::object());
  nlohmann::json d = j.value("discriminator", nlohmann::json::object());
  for (const char* shared : {"image_shape", "num_classes"}) {
    if (!j.contains(shared)) continue;
    if (!g.contains(shared)) g[shared] = j.at(shared);
    if (!d.contains(shared)) d[shared] = j.at(shared);
  }
  s.generator = g.get<nn::GeneratorSpec>();
  s.discriminator = d.get<nn::DiscriminatorSpec>();
  s.Validate();
}

}  // namespace fairgan::training
