// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_NN_MODULE_H_
#define FAIRGAN_NN_MODULE_H_

#include <map>
#include <random>
#include <span>
#include <string>

#include "fairgan/nn/tape.h"
#include "fairgan/nn/tensor.h"

namespace fairgan::nn {

// Ordered by name, so iteration (and hence serialisation) is deterministic.
template <typename T>
using TensorMap = std::map<std::string, Tensor<T>>;

enum class Mode { kTrain, kEval };

struct ForwardOptions {
  Mode mode = Mode::kTrain;
  // Commit running batch-norm statistics and advance spectral-norm vectors.
  bool update_state = true;
};

// A parameter map bound to leaf variables of one tape.
template <typename T>
class Binding {
 public:
  Binding(Tape<T>& tape, const TensorMap<T>& params, bool trainable) {
    for (const auto& [name, value] : params) {
      vars_[name] = trainable ? tape.Leaf(value) : tape.Constant(value);
    }
  }
  // Wraps variables already on a tape.
  explicit Binding(std::map<std::string, Var> vars) : vars_(std::move(vars)) {}

  Var operator[](const std::string& name) const {
    auto it = vars_.find(name);
    if (it == vars_.end()) throw std::out_of_range("unknown parameter '" + name + "'");
    return it->second;
  }

  // Gradients after Tape::Backward; zeros for parameters that received none.
  TensorMap<T> Gradients(const Tape<T>& tape) const {
    TensorMap<T> out;
    for (const auto& [name, var] : vars_) {
      const Tensor<T>* g = tape.grad(var);
      out[name] = g ? *g : Tensor<T>(tape.value(var).shape());
    }
    return out;
  }

  const std::map<std::string, Var>& vars() const { return vars_; }

 private:
  std::map<std::string, Var> vars_;
};

// Glorot-uniform weight of the given shape; fan_in/fan_out follow the
// [out, in, k, k] layout.
template <typename T>
Tensor<T> GlorotUniform(Shape shape, std::mt19937_64& rng);

// Batch normalisation with per-class affine parameters gamma, beta [K, C].
// In train mode the batch statistics are used; when `update_state` is set the
// running statistics are moved towards them with the given momentum (unbiased
// variance). In eval mode the running statistics are used.
template <typename T>
Var ConditionalBatchNorm(Tape<T>& tape, Var x, Var gamma, Var beta,
                         std::span<const int> classes, const ForwardOptions& options,
                         Tensor<T>& running_mean, Tensor<T>& running_var, T eps,
                         T momentum);

}  // namespace fairgan::nn

#endif  // FAIRGAN_NN_MODULE_H_
