// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_NN_DISCRIMINATOR_H_
#define FAIRGAN_NN_DISCRIMINATOR_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fairgan/nn/module.h"
#include "fairgan/nn/specs.h"
#include "fairgan/nn/tape.h"

namespace fairgan::nn {

// The four heads; every entry has the input batch as its leading dimension.
struct DiscriminatorOutputs {
  Var s_joint;           // [N]    joint (x, y) real/fake logit
  Var s_x;               // [N]    image-only real/fake logit
  Var logits_c_given_x;  // [N, K]
  Var logits_c_given_y;  // [N, K]
  Var phi;               // [N, F] shared trunk features
};

// Projection discriminator with a spectrally normalised residual trunk.
//
// phi(x) = sum-pool(ReLU(trunk(x))), where the trunk is num_down_blocks
// residual blocks with 2x average-pool downsampling (the first block is the
// "optimized" variant without a leading ReLU). s_x and the P(C|X) logits are
// independent linear maps of phi; s_joint = y <v_y, phi> + <v_x, phi>; the
// P(C|Y) logits come from two dense layers on y alone.
template <typename T>
class Discriminator {
 public:
  Discriminator(DiscriminatorSpec spec, std::uint64_t seed);
  Discriminator(DiscriminatorSpec spec, TensorMap<T> params, TensorMap<T> buffers);

  const DiscriminatorSpec& spec() const { return spec_; }
  const TensorMap<T>& params() const { return params_; }
  TensorMap<T>& params() { return params_; }
  const TensorMap<T>& buffers() const { return buffers_; }
  TensorMap<T>& buffers() { return buffers_; }

  // x [N, C, H, W]; y [N] with every value in [-1, 1]. Advances the
  // spectral-norm vectors iff options.update_state.
  DiscriminatorOutputs Forward(Tape<T>& tape, const Binding<T>& params, Var x, Var y,
                               const ForwardOptions& options);

  // Trunk features only.
  Var Features(Tape<T>& tape, const Binding<T>& params, Var x,
               const ForwardOptions& options);

  // Names of every spectrally normalised weight.
  std::vector<std::string> NormalizedWeights() const;

  template <typename U>
  Discriminator<U> Cast() const {
    TensorMap<U> p, b;
    for (const auto& [k, v] : params_) p[k] = v.template Cast<U>();
    for (const auto& [k, v] : buffers_) b[k] = v.template Cast<U>();
    return Discriminator<U>(spec_, std::move(p), std::move(b));
  }

 private:
  // weight / sigma with the power-iteration vector stored in buffers_.
  Var Normalized(Tape<T>& tape, const Binding<T>& params, const std::string& name,
                 const ForwardOptions& options);

  DiscriminatorSpec spec_;
  TensorMap<T> params_;
  TensorMap<T> buffers_;
};

}  // namespace fairgan::nn

#endif  // FAIRGAN_NN_DISCRIMINATOR_H_
