// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_TRAINING_ADAM_H_
#define FAIRGAN_TRAINING_ADAM_H_

#include <cstdint>

#include "fairgan/nn/module.h"

namespace fairgan::training {

// First and second moment estimates, keyed like the parameters they track.
struct AdamState {
  nn::TensorMap<float> m;
  nn::TensorMap<float> v;
  std::int64_t t = 0;

  bool operator==(const AdamState&) const = default;
};

struct AdamHyper {
  double lr;
  double beta1;
  double beta2;
  double eps;
};

// One bias-corrected Adam update of every parameter that has a gradient.
// Moments are created on first use.
void AdamUpdate(nn::TensorMap<float>& params, const nn::TensorMap<float>& grads,
                AdamState& state, const AdamHyper& hyper);

}  // namespace fairgan::training

#endif  // FAIRGAN_TRAINING_ADAM_H_
