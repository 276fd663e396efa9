// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_EVALUATION_CLASSIFIER_H_
#define FAIRGAN_EVALUATION_CLASSIFIER_H_

#include <cstdint>
#include <vector>

#include "fairgan/core/dataset.h"
#include "fairgan/nn/discriminator.h"
#include "json.hpp"

namespace fairgan::evaluation {

enum class ClassifierMode { kFull, kLinearProbe };

// The evaluation classifier is the discriminator's phi trunk followed by a
// linear map to two outcome logits. Optimizer settings default to the GAN's
// Adam settings with a smaller budget and a constant rate.
struct ClassifierConfig {
  ClassifierMode mode = ClassifierMode::kFull;
  nn::DiscriminatorSpec trunk;  // FULL only; LINEAR_PROBE takes the pretrained spec
  std::int64_t steps = 1000;
  int batch_size = 64;
  double lr = 2e-4;
  double beta1 = 0.0;
  double beta2 = 0.9;
  double adam_eps = 1e-8;

  void Validate() const;  // throws ConfigError
  bool operator==(const ClassifierConfig&) const = default;
};

void to_json(nlohmann::json& j, const ClassifierConfig& c);
void from_json(const nlohmann::json& j, ClassifierConfig& c);
std::string_view ToString(ClassifierMode mode);
ClassifierMode ParseClassifierMode(std::string_view text);

class OutcomeClassifier {
 public:
  // Fresh trunk and head.
  OutcomeClassifier(const nn::DiscriminatorSpec& spec, std::uint64_t seed);
  // Trunk copied from a pretrained discriminator, fresh head.
  OutcomeClassifier(const nn::Discriminator<float>& pretrained, std::uint64_t seed);

  // P(Y = 1 | x) per sample, eval mode; never changes any state.
  std::vector<double> Score(const AttributedDataset& data);
  // phi(x) per sample, [N, feature_dim].
  nn::Tensor<float> Features(const AttributedDataset& data);

  const nn::TensorMap<float>& trunk_params() const { return trunk_.params(); }
  const nn::TensorMap<float>& trunk_buffers() const { return trunk_.buffers(); }
  nn::TensorMap<float>& trunk_params() { return trunk_.params(); }
  nn::TensorMap<float>& trunk_buffers() { return trunk_.buffers(); }
  const nn::TensorMap<float>& head() const { return head_; }
  nn::TensorMap<float>& head() { return head_; }
  const nn::DiscriminatorSpec& spec() const { return trunk_.spec(); }
  nn::Discriminator<float>& trunk() { return trunk_; }

 private:
  nn::Discriminator<float> trunk_;  // only the phi-trunk entries are kept
  nn::TensorMap<float> head_;       // head.weight [2, F], head.bias [2]
};

// FULL trains trunk and head on cross-entropy against y_hard; LINEAR_PROBE
// freezes `probe_features` and fits only the head. Throws DataError for
// unlabeled or mis-shaped data and ConfigError for LINEAR_PROBE without a
// trunk.
OutcomeClassifier TrainOutcomeClassifier(const AttributedDataset& train_data,
                                         const ClassifierConfig& config,
                                         const nn::Discriminator<float>* probe_features,
                                         std::uint64_t seed);

// Fraction of samples whose thresholded score matches y_hard.
double Accuracy(const std::vector<double>& scores, const AttributedDataset& data,
                double threshold = 0.5);

}  // namespace fairgan::evaluation

#endif  // FAIRGAN_EVALUATION_CLASSIFIER_H_
