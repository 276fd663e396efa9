// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_NN_SPECTRAL_NORM_H_
#define FAIRGAN_NN_SPECTRAL_NORM_H_

#include <cstdint>
#include <random>
#include <vector>

#include "fairgan/nn/tensor.h"

namespace fairgan::nn {

// Persistent left power-iteration vector for one weight, viewed as the
// matrix [dim0, prod(rest)].
template <typename T>
struct SpectralNormState {
  std::vector<T> u;
  int n_power_iterations = 1;
};

template <typename T>
struct PowerIterationResult {
  std::vector<T> u;  // unit left vector after the iterations
  std::vector<T> v;  // unit right vector, v = normalize(W^T u_prev)
  T sigma;           // u^T W v, floored at 1e-12
};

// Runs `iterations` steps of v <- W^T u / |W^T u|, u <- W v / |W v|.
// With zero iterations, v is derived from the given u and u is unchanged.
template <typename T>
PowerIterationResult<T> PowerIterate(const Tensor<T>& weight, const std::vector<T>& u,
                                     int iterations);

template <typename T>
struct SpectralNormResult {
  Tensor<T> normalized;
  SpectralNormState<T> state;
  T sigma;
};

// weight / sigma_hat, with the state advanced by state.n_power_iterations.
// A zero weight has sigma_hat clamped to 1e-12 and logs a warning.
template <typename T>
SpectralNormResult<T> SpectralNormalize(const Tensor<T>& weight,
                                        const SpectralNormState<T>& state);

// Random unit vector of length `rows`.
template <typename T>
std::vector<T> RandomUnitVector(int rows, std::mt19937_64& rng);

}  // namespace fairgan::nn

#endif  // FAIRGAN_NN_SPECTRAL_NORM_H_
