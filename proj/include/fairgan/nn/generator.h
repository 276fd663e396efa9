// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_NN_GENERATOR_H_
#define FAIRGAN_NN_GENERATOR_H_

#include <cstdint>
#include <span>
#include <utility>

#include "fairgan/nn/module.h"
#include "fairgan/nn/specs.h"
#include "fairgan/nn/tape.h"

namespace fairgan::nn {

// Maps (c, z) to an image in (-1, 1)^shape and an outcome in (-1, 1).
//
// Image path: linear -> reshape -> num_up_blocks pre-activation residual
// blocks (conditional BN, ReLU, nearest 2x upsample, 3x3 conv, conditional BN,
// ReLU, 3x3 conv; shortcut is upsample plus a 1x1 conv when the width
// changes) -> conditional BN -> ReLU -> 3x3 conv -> tanh.
// Outcome path: dense -> ReLU -> dense -> tanh on z (optionally concatenated
// with a class embedding).
template <typename T>
class Generator {
 public:
  struct Outputs {
    Var x_fake;  // [N, C, H, W]
    Var y_fake;  // [N]
  };

  Generator(GeneratorSpec spec, std::uint64_t seed);
  // Takes parameters and buffers as given (e.g. from a checkpoint).
  Generator(GeneratorSpec spec, TensorMap<T> params, TensorMap<T> buffers);

  const GeneratorSpec& spec() const { return spec_; }
  const TensorMap<T>& params() const { return params_; }
  TensorMap<T>& params() { return params_; }
  const TensorMap<T>& buffers() const { return buffers_; }
  TensorMap<T>& buffers() { return buffers_; }

  // `params` must be bound from params() (possibly on a different tape).
  // Mutates running batch-norm statistics iff options request it.
  Outputs Forward(Tape<T>& tape, const Binding<T>& params, std::span<const int> classes,
                  Var z, const ForwardOptions& options);

  // Non-recording convenience pass: returns (x_fake, y_fake).
  std::pair<Tensor<T>, Tensor<T>> Sample(std::span<const int> classes, const Tensor<T>& z,
                                         const ForwardOptions& options);

  template <typename U>
  Generator<U> Cast() const {
    TensorMap<U> p, b;
    for (const auto& [k, v] : params_) p[k] = v.template Cast<U>();
    for (const auto& [k, v] : buffers_) b[k] = v.template Cast<U>();
    return Generator<U>(spec_, std::move(p), std::move(b));
  }

 private:
  Var Cbn(Tape<T>& tape, const Binding<T>& params, const std::string& name, Var x,
          std::span<const int> classes, const ForwardOptions& options);

  GeneratorSpec spec_;
  TensorMap<T> params_;
  TensorMap<T> buffers_;
};

}  // namespace fairgan::nn

#endif  // FAIRGAN_NN_GENERATOR_H_
