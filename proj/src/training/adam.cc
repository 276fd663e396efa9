// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include "fairgan/training/adam.h"

#include <cmath>
#include <stdexcept>

namespace fairgan::training {

void AdamUpdate(nn::TensorMap<float>& params, const nn::TensorMap<float>& grads,
                AdamState& state, const AdamHyper& h) {
  ++state.t;
  const double t = static_cast<double>(state.t);
  const double c1 = 1.0 - std::pow(h.beta1, t);
  const double c2 = 1.0 - std::pow(h.beta2, t);
  for (const auto& [name, g] : grads) {
    auto& p = params.at(name);
    if (p.shape() != g.shape()) throw std::invalid_argument("adam: shape mismatch for " + name);
    auto& m = state.m.try_emplace(name, p.shape()).first->second;
    auto& v = state.v.try_emplace(name, p.shape()).first->second;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double gi = g[i];
      const double mi = h.beta1 * m[i] + (1.0 - h.beta1) * gi;
      const double vi = h.beta2 * v[i] + (1.0 - h.beta2) * gi * gi;
      m[i] = static_cast<float>(mi);
      v[i] = static_cast<float>(vi);
      const double step = h.lr * (mi / c1) / (std::sqrt(vi / c2) + h.eps);
      p[i] = static_cast<float>(p[i] - step);
    }
  }
}

}  // namespace fairgan::training
