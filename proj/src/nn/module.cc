// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include "fairgan/nn/module.h"

#include <cmath>

#include "fairgan/nn/ops.h"

namespace fairgan::nn {

template <typename T>
Tensor<T> GlorotUniform(Shape shape, std::mt19937_64& rng) {
  const int out = shape.at(0);
  const int in = shape.size() > 1 ? shape[1] : 1;
  std::size_t receptive = 1;
  for (std::size_t i = 2; i < shape.size(); ++i) receptive *= static_cast<std::size_t>(shape[i]);
  const double fan_in = static_cast<double>(in) * receptive;
  const double fan_out = static_cast<double>(out) * receptive;
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Tensor<T> w(std::move(shape));
  for (auto& v : w.values()) v = static_cast<T>(dist(rng));
  return w;
}

template <typename T>
Var ConditionalBatchNorm(Tape<T>& tape, Var x, Var gamma, Var beta,
                         std::span<const int> classes, const ForwardOptions& options,
                         Tensor<T>& running_mean, Tensor<T>& running_var, T eps,
                         T momentum) {
  Var normalized;
  if (options.mode == Mode::kTrain) {
    Tensor<T> mean, var;
    normalized = BatchNormTrain(tape, x, eps, &mean, &var);
    if (options.update_state) {
      const auto& shape = tape.value(x).shape();
      const double count = static_cast<double>(NumElements(shape)) / shape[1];
      const double unbias = count > 1 ? count / (count - 1) : 1.0;
      for (std::size_t c = 0; c < mean.size(); ++c) {
        running_mean[c] = (T(1) - momentum) * running_mean[c] + momentum * mean[c];
        running_var[c] = (T(1) - momentum) * running_var[c] +
                         momentum * static_cast<T>(var[c] * unbias);
      }
    }
  } else {
    normalized = BatchNormEval(tape, x, running_mean, running_var, eps);
  }
  return ClassAffine(tape, normalized, gamma, beta, classes);
}

template Tensor<float> GlorotUniform<float>(Shape, std::mt19937_64&);
template Tensor<double> GlorotUniform<double>(Shape, std::mt19937_64&);
template Var ConditionalBatchNorm<float>(Tape<float>&, Var, Var, Var, std::span<const int>,
                                         const ForwardOptions&, Tensor<float>&,
                                         Tensor<float>&, float, float);
template Var ConditionalBatchNorm<double>(Tape<double>&, Var, Var, Var,
                                          std::span<const int>, const ForwardOptions&,
                                          Tensor<double>&, Tensor<double>&, double, double);

}  // namespace fairgan::nn
