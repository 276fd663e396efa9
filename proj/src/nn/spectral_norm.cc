// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include "fairgan/nn/spectral_norm.h"

#include <Eigen/Core>
#include <spdlog/spdlog.h>

#include <cmath>
#include <stdexcept>

namespace fairgan::nn {
namespace {

constexpr double kSigmaFloor = 1e-12;

template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <typename T>
void NormalizeInPlace(Vec<T>& x) {
  const T norm = x.norm();
  x /= std::max(norm, static_cast<T>(kSigmaFloor));
}

}  // namespace

template <typename T>
PowerIterationResult<T> PowerIterate(const Tensor<T>& weight, const std::vector<T>& u,
                                     int iterations) {
  const int rows = weight.dim(0);
  const int cols = static_cast<int>(weight.size() / static_cast<std::size_t>(rows));
  if (static_cast<int>(u.size()) != rows) {
    throw std::invalid_argument("power iteration: u has " + std::to_string(u.size()) +
                                " entries, weight has " + std::to_string(rows) + " rows");
  }
  Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> w(
      weight.data(), rows, cols);
  Vec<T> uu = Eigen::Map<const Vec<T>>(u.data(), rows);
  Vec<T> vv = w.transpose() * uu;
  NormalizeInPlace(vv);
  for (int it = 0; it < iterations; ++it) {
    uu = w * vv;
    NormalizeInPlace(uu);
    if (it + 1 < iterations) {
      vv = w.transpose() * uu;
      NormalizeInPlace(vv);
    }
  }
  PowerIterationResult<T> out;
  out.u.assign(uu.data(), uu.data() + rows);
  out.v.assign(vv.data(), vv.data() + cols);
  out.sigma = std::max(uu.dot(w * vv), static_cast<T>(kSigmaFloor));
  return out;
}

template <typename T>
SpectralNormResult<T> SpectralNormalize(const Tensor<T>& weight,
                                        const SpectralNormState<T>& state) {
  auto it = PowerIterate(weight, state.u, state.n_power_iterations);
  if (it.sigma <= static_cast<T>(kSigmaFloor)) {
    spdlog::warn("spectral norm: weight {} has vanishing spectral norm; sigma "
                 "clamped to {}",
                 ShapeToString(weight.shape()), kSigmaFloor);
  }
  SpectralNormResult<T> out{weight, {std::move(it.u), state.n_power_iterations}, it.sigma};
  for (auto& e : out.normalized.values()) e /= it.sigma;
  return out;
}

template <typename T>
std::vector<T> RandomUnitVector(int rows, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> raw(static_cast<std::size_t>(rows));
  double norm = 0;
  for (auto& r : raw) {
    r = normal(rng);
    norm += r * r;
  }
  norm = std::sqrt(std::max(norm, kSigmaFloor));
  std::vector<T> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = static_cast<T>(raw[i] / norm);
  return out;
}

template struct PowerIterationResult<float>;
template struct PowerIterationResult<double>;
template PowerIterationResult<float> PowerIterate(const Tensor<float>&,
                                                  const std::vector<float>&, int);
template PowerIterationResult<double> PowerIterate(const Tensor<double>&,
                                                   const std::vector<double>&, int);
template SpectralNormResult<float> SpectralNormalize(const Tensor<float>&,
                                                     const SpectralNormState<float>&);
template SpectralNormResult<double> SpectralNormalize(const Tensor<double>&,
                                                      const SpectralNormState<double>&);
template std::vector<float> RandomUnitVector<float>(int, std::mt19937_64&);
template std::vector<double> RandomUnitVector<double>(int, std::mt19937_64&);

}  // namespace fairgan::nn
