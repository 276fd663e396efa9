// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_TRAINING_TRAINER_H_
#define FAIRGAN_TRAINING_TRAINER_H_

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fairgan/core/dataset.h"
#include "fairgan/nn/discriminator.h"
#include "fairgan/nn/generator.h"
#include "fairgan/objectives/objectives.h"
#include "fairgan/training/adam.h"
#include "fairgan/training/config.h"

namespace fairgan::training {

// Sampling without replacement over [0, n), reshuffled at every epoch.
class EpochSampler {
 public:
  EpochSampler() = default;
  EpochSampler(std::size_t n, std::uint64_t seed);

  // The next `count` indices, crossing epoch boundaries as needed.
  std::vector<std::size_t> Next(std::size_t count);

  std::size_t size() const { return order_.size(); }
  std::int64_t epoch() const { return epoch_; }

  nlohmann::json ToJson() const;
  static EpochSampler FromJson(const nlohmann::json& j);
  bool operator==(const EpochSampler&) const = default;

 private:
  void Reshuffle();

  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
  std::int64_t epoch_ = 0;
  std::mt19937_64 rng_;
};

// Everything needed to continue a run exactly.
struct TrainState {
  TrainState(nn::Generator<float> g, nn::Discriminator<float> d)
      : generator(std::move(g)), discriminator(std::move(d)) {}

  std::int64_t step = 0;
  nn::Generator<float> generator;
  nn::Discriminator<float> discriminator;
  AdamState g_adam;
  AdamState d_adam;
  // Latent noise for the updates.
  std::mt19937_64 rng;
  // Outcome perturbation and batch order.
  std::mt19937_64 data_rng;
  EpochSampler labeled_sampler;
  EpochSampler unlabeled_sampler;
};

// Fresh networks and optimizer state derived from cfg.seed.
TrainState InitTrainState(const ModelSpecs& specs, const TrainConfig& cfg,
                          std::size_t n_labeled, std::size_t n_unlabeled);

// Exact equality of every field, including generator states.
bool StatesEqual(const TrainState& a, const TrainState& b);

// y_soft = (2 y - 1) * magnitude + N(0, noise_std^2), clamped to
// [-0.999, 0.999].
std::vector<float> SoftenAndPerturb(std::span<const int> y_hard, double magnitude,
                                    double noise_std, std::mt19937_64& rng);

// lr_init * (1 - step / total_steps).
double LrAt(std::int64_t step, const TrainConfig& cfg);

struct Batch {
  nn::Tensor<float> x;       // [N, C, H, W]
  std::vector<int> c;        // [N]
  nn::Tensor<float> y_soft;  // [N]; empty for unlabeled batches

  int size() const { return static_cast<int>(c.size()); }
};

// Stacks the given samples; softens labeled outcomes with `rng`.
Batch MakeBatch(const AttributedDataset& data, std::span<const std::size_t> indices,
                bool labeled, const TrainConfig& cfg, std::mt19937_64& rng);

struct StepResult {
  bool aborted = false;
  std::string diagnostic;
  double lr = 0;
  objectives::LossBreakdown d_loss;  // from the last discriminator update
  objectives::LossBreakdown g_loss;
};

// d_steps_per_g_step discriminator updates then one generator update. On a
// non-finite loss or gradient, `state` is left untouched and the result is
// flagged.
StepResult TrainStep(TrainState& state, const Batch& labeled, const Batch& unlabeled,
                     const TrainConfig& cfg);

struct TrainOutputs {
  // Directory for checkpoints and the loss log; empty disables file output.
  std::string run_dir;
  // Called after every attempted step.
  std::function<void(const TrainState&, const StepResult&)> on_step;
};

struct TrainResult {
  std::vector<std::string> checkpoints;
  std::string loss_log;
  std::int64_t aborted_steps = 0;
};

// Checks both datasets, then runs TrainStep until state.step reaches
// cfg.total_steps. Works from a resumed state as well as a fresh one.
TrainResult Train(TrainState& state, const ModelSpecs& specs, const TrainConfig& cfg,
                  const AttributedDataset& labeled, const AttributedDataset* unlabeled,
                  const TrainOutputs& outputs);

// Real batch split for a given batch size.
struct BatchSplit {
  int labeled;
  int unlabeled;
};
BatchSplit SplitBatch(const TrainConfig& cfg, bool has_unlabeled);

// Eval-mode samples from the generator: c ~ Bernoulli(class_marginal),
// z ~ N(0, I), y_hard = [y_fake > y_threshold].
AttributedDataset GenerateDebiasedDataset(nn::Generator<float>& generator, std::int64_t n,
                                          double class_marginal, std::uint64_t seed,
                                          double y_threshold = 0.0);

}  // namespace fairgan::training

#endif  // FAIRGAN_TRAINING_TRAINER_H_
