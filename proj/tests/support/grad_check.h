// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_TESTS_SUPPORT_GRAD_CHECK_H_
#define FAIRGAN_TESTS_SUPPORT_GRAD_CHECK_H_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "fairgan/nn/module.h"
#include "fairgan/nn/tape.h"

namespace fairgan::testing {

using LossFn = std::function<nn::Var(nn::Tape<double>&, const std::map<std::string, nn::Var>&)>;

struct GradCheckResult {
  double max_rel_error = 0;
  std::string worst;
  int checked = 0;
};

// Compares reverse-mode gradients with central differences.
//
// Per input tensor, up to `max_per_tensor` coordinates are sampled and the
// error is |a - n|_2 / max(|a|_2, |n|_2, floor) over those coordinates, where
// a is analytic and n numeric. The floor keeps tensors whose gradient is
// identically zero (e.g. a bias feeding batch norm) from being judged on
// round-off alone.
inline GradCheckResult CheckGradients(const nn::TensorMap<double>& inputs, const LossFn& loss,
                                      double h = 1e-6, int max_per_tensor = 24,
                                      double floor = 1e-5, unsigned seed = 7) {
  nn::Tape<double> tape;
  nn::Binding<double> bind(tape, inputs, true);
  const nn::Var root = loss(tape, bind.vars());
  tape.Backward(root);
  const nn::TensorMap<double> analytic = bind.Gradients(tape);

  auto eval = [&](const nn::TensorMap<double>& at) {
    nn::Tape<double> t(false);
    nn::Binding<double> b(t, at, false);
    return t.value(loss(t, b.vars()))[0];
  };

  GradCheckResult result;
  std::mt19937 rng(seed);
  nn::TensorMap<double> probe = inputs;
  for (const auto& [name, value] : inputs) {
    std::vector<std::size_t> idx(value.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(std::min<std::size_t>(idx.size(), static_cast<std::size_t>(max_per_tensor)));
    double diff2 = 0, a2 = 0, n2 = 0;
    for (std::size_t i : idx) {
      auto& p = probe[name][i];
      const double orig = p;
      p = orig + h;
      const double up = eval(probe);
      p = orig - h;
      const double down = eval(probe);
      p = orig;
      const double num = (up - down) / (2 * h);
      const double ana = analytic.at(name)[i];
      diff2 += (ana - num) * (ana - num);
      a2 += ana * ana;
      n2 += num * num;
      ++result.checked;
    }
    const double err =
        std::sqrt(diff2) / std::max({std::sqrt(a2), std::sqrt(n2), floor});
    if (std::getenv("FAIRGAN_GRADCHECK_VERBOSE")) {
      std::fprintf(stderr, "%-28s err %.3e |a| %.3e |n| %.3e\n", name.c_str(), err,
                   std::sqrt(a2), std::sqrt(n2));
    }
    if (err >= result.max_rel_error) {
      result.max_rel_error = err;
      result.worst = name;
    }
  }
  return result;
}

inline nn::Tensor<double> RandomTensor(nn::Shape shape, std::mt19937_64& rng, double scale = 1) {
  nn::Tensor<double> t(std::move(shape));
  std::normal_distribution<double> dist(0, scale);
  for (auto& v : t.values()) v = dist(rng);
  return t;
}

}  // namespace fairgan::testing

#endif  // FAIRGAN_TESTS_SUPPORT_GRAD_CHECK_H_
