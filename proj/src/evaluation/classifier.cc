// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include "fairgan/evaluation/classifier.h"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "fairgan/core/errors.h"
#include "fairgan/core/json_fields.h"
#include "fairgan/nn/ops.h"
#include "fairgan/training/adam.h"
#include "fairgan/training/trainer.h"

namespace fairgan::evaluation {
namespace {

constexpr int kScoreBatch = 64;

bool IsTrunkEntry(const std::string& name) { return name.rfind("block", 0) == 0; }

nn::Discriminator<float> TrunkOnly(nn::Discriminator<float> d) {
  std::erase_if(d.params(), [](const auto& kv) { return !IsTrunkEntry(kv.first); });
  std::erase_if(d.buffers(), [](const auto& kv) { return !IsTrunkEntry(kv.first); });
  return d;
}

nn::TensorMap<float> FreshHead(int feature_dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return {{"head.weight", nn::GlorotUniform<float>({2, feature_dim}, rng)},
          {"head.bias", nn::Tensor<float>({2}, 0.0f)}};
}

nn::Tensor<float> Stack(const AttributedDataset& data, std::size_t begin, std::size_t end) {
  const auto& s = data.image_shape;
  nn::Tensor<float> x({static_cast<int>(end - begin), s.channels, s.height, s.width});
  for (std::size_t i = begin; i < end; ++i) {
    std::copy(data.samples[i].x.begin(), data.samples[i].x.end(),
              x.data() + (i - begin) * s.size());
  }
  return x;
}

void CheckShape(const AttributedDataset& data, const nn::DiscriminatorSpec& spec,
                const char* what) {
  if (data.image_shape != spec.image_shape) {
    throw DataError(std::string(what) + ": image_shape " + data.image_shape.ToString() +
                    " does not match the classifier's " + spec.image_shape.ToString());
  }
}

double PositiveProbability(double l0, double l1) { return 1.0 / (1.0 + std::exp(l0 - l1)); }

void Check(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("classifier config: " + what);
}

}  // namespace

std::string_view ToString(ClassifierMode mode) {
  return mode == ClassifierMode::kFull ? "full" : "linear_probe";
}

ClassifierMode ParseClassifierMode(std::string_view text) {
  if (text == "full") return ClassifierMode::kFull;
  if (text == "linear_probe") return ClassifierMode::kLinearProbe;
  throw ConfigError("classifier mode must be full|linear_probe, got '" + std::string(text) +
                    "'");
}

void ClassifierConfig::Validate() const {
  Check(steps >= 1, "steps must be >= 1");
  Check(batch_size >= 1, "batch_size must be >= 1");
  Check(lr > 0, "lr must be > 0");
  Check(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1, "betas must lie in [0, 1)");
  Check(adam_eps > 0, "adam_eps must be > 0");
  try {
    trunk.Validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("classifier trunk: ") + e.what());
  }
}

void to_json(nlohmann::json& j, const ClassifierConfig& c) {
  j = {{"mode", ToString(c.mode)}, {"trunk", c.trunk},   {"steps", c.steps},
       {"batch_size", c.batch_size}, {"lr", c.lr},       {"beta1", c.beta1},
       {"beta2", c.beta2},           {"adam_eps", c.adam_eps}};
}

void from_json(const nlohmann::json& j, ClassifierConfig& c) {
  RejectUnknownKeys(j, {"mode", "trunk", "steps", "batch_size", "lr", "beta1", "beta2", "adam_eps"},
                    "classifier");
  if (j.contains("mode")) c.mode = ParseClassifierMode(j.at("mode").get<std::string>());
  ReadField(j, "trunk", c.trunk);
  ReadField(j, "steps", c.steps);
  ReadField(j, "batch_size", c.batch_size);
  ReadField(j, "lr", c.lr);
  ReadField(j, "beta1", c.beta1);
  ReadField(j, "beta2", c.beta2);
  ReadField(j, "adam_eps", c.adam_eps);
  c.Validate();
}

OutcomeClassifier::OutcomeClassifier(const nn::DiscriminatorSpec& spec, std::uint64_t seed)
    : trunk_(TrunkOnly(nn::Discriminator<float>(spec, seed))),
      head_(FreshHead(spec.FeatureDim(), seed ^ 0x9e3779b97f4a7c15ULL)) {}

OutcomeClassifier::OutcomeClassifier(const nn::Discriminator<float>& pretrained,
                                     std::uint64_t seed)
    : trunk_(TrunkOnly(pretrained)),
      head_(FreshHead(pretrained.spec().FeatureDim(), seed ^ 0x9e3779b97f4a7c15ULL)) {}

nn::Tensor<float> OutcomeClassifier::Features(const AttributedDataset& data) {
  CheckShape(data, trunk_.spec(), "classifier input");
  const int f = trunk_.spec().FeatureDim();
  nn::Tensor<float> out({static_cast<int>(data.size()), f});
  const nn::ForwardOptions eval{nn::Mode::kEval, false};
  for (std::size_t b = 0; b < data.size(); b += kScoreBatch) {
    const std::size_t e = std::min(data.size(), b + kScoreBatch);
    nn::Tape<float> tape(false);
    nn::Binding<float> params(tape, trunk_.params(), false);
    const nn::Var phi = trunk_.Features(tape, params, tape.Constant(Stack(data, b, e)), eval);
    const auto& v = tape.value(phi);
    std::copy(v.data(), v.data() + v.size(), out.data() + b * f);
  }
  return out;
}

std::vector<double> OutcomeClassifier::Score(const AttributedDataset& data) {
  const auto phi = Features(data);
  const int f = trunk_.spec().FeatureDim();
  const auto& w = head_.at("head.weight");
  const auto& bias = head_.at("head.bias");
  std::vector<double> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    double l[2];
    for (int k = 0; k < 2; ++k) {
      double acc = bias[k];
      for (int q = 0; q < f; ++q) acc += static_cast<double>(w[k * f + q]) * phi[i * f + q];
      l[k] = acc;
    }
    out[i] = PositiveProbability(l[0], l[1]);
  }
  return out;
}

OutcomeClassifier TrainOutcomeClassifier(const AttributedDataset& train_data,
                                         const ClassifierConfig& config,
                                         const nn::Discriminator<float>* probe_features,
                                         std::uint64_t seed) {
  config.Validate();
  if (!train_data.outcome_labeled) {
    throw DataError("classifier training data carries no outcome labels");
  }
  if (train_data.empty()) throw DataError("classifier training data is empty");
  const bool probe = config.mode == ClassifierMode::kLinearProbe;
  if (probe && !probe_features) {
    throw ConfigError("linear_probe mode needs a pretrained trunk (probe_features)");
  }
  std::mt19937_64 seeds(seed);
  const std::uint64_t init_seed = seeds();
  const std::uint64_t sampler_seed = seeds();
  OutcomeClassifier clf = probe ? OutcomeClassifier(*probe_features, init_seed)
                                : OutcomeClassifier(config.trunk, init_seed);
  CheckShape(train_data, clf.spec(), "classifier training data");

  std::vector<int> labels(train_data.size());
  for (std::size_t i = 0; i < train_data.size(); ++i) {
    labels[i] = train_data.samples[i].y_hard.value();
  }
  const int f = clf.spec().FeatureDim();
  const nn::Tensor<float> frozen_phi = probe ? clf.Features(train_data) : nn::Tensor<float>();
  training::EpochSampler sampler(train_data.size(), sampler_seed);
  training::AdamState trunk_adam, head_adam;
  const training::AdamHyper hyper{config.lr, config.beta1, config.beta2, config.adam_eps};
  const auto& shape = train_data.image_shape;
  for (std::int64_t step = 0; step < config.steps; ++step) {
    const auto idx = sampler.Next(static_cast<std::size_t>(config.batch_size));
    const int n = static_cast<int>(idx.size());
    std::vector<int> y(n);
    nn::Tape<float> tape;
    nn::Var phi;
    std::optional<nn::Binding<float>> trunk_vars;
    if (probe) {
      nn::Tensor<float> rows({n, f});
      for (int i = 0; i < n; ++i) {
        std::copy(frozen_phi.data() + idx[i] * f, frozen_phi.data() + (idx[i] + 1) * f,
                  rows.data() + static_cast<std::size_t>(i) * f);
      }
      phi = tape.Constant(std::move(rows));
    } else {
      nn::Tensor<float> x({n, shape.channels, shape.height, shape.width});
      for (int i = 0; i < n; ++i) {
        const auto& s = train_data.samples[idx[i]].x;
        std::copy(s.begin(), s.end(), x.data() + static_cast<std::size_t>(i) * shape.size());
      }
      trunk_vars.emplace(tape, clf.trunk_params(), true);
      phi = clf.trunk().Features(tape, *trunk_vars, tape.Constant(std::move(x)),
                                 {nn::Mode::kTrain, true});
    }
    for (int i = 0; i < n; ++i) y[i] = labels[idx[i]];
    nn::Binding<float> head_vars(tape, clf.head(), true);
    const nn::Var logits = nn::Linear(tape, phi, head_vars["head.weight"], head_vars["head.bias"]);
    const nn::Var loss = nn::SoftmaxCrossEntropy<float>(tape, logits, y);
    if (!std::isfinite(tape.value(loss)[0])) {
      throw NumericError("classifier loss is not finite at step " + std::to_string(step));
    }
    tape.Backward(loss);
    if (trunk_vars) training::AdamUpdate(clf.trunk_params(), trunk_vars->Gradients(tape),
                                         trunk_adam, hyper);
    training::AdamUpdate(clf.head(), head_vars.Gradients(tape), head_adam, hyper);
  }
  return clf;
}

double Accuracy(const std::vector<double>& scores, const AttributedDataset& data,
                double threshold) {
  if (scores.size() != data.size() || data.empty()) {
    throw std::invalid_argument("accuracy: scores do not match the dataset");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    hits += (scores[i] > threshold ? 1 : 0) == data.samples[i].y_hard.value();
  }
  return static_cast<double>(hits) / static_cast<double>(scores.size());
}

}  // namespace fairgan::evaluation
