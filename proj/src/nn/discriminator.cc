// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include "fairgan/nn/discriminator.h"

#include <random>
#include <stdexcept>

#include "fairgan/nn/ops.h"
#include "fairgan/nn/spectral_norm.h"

namespace fairgan::nn {
namespace {

std::string Block(int i) { return "block" + std::to_string(i); }
constexpr const char* kPowerVector = ".sn_u";

bool IsNormalized(const std::string& name) {
  auto ends_with = [&](const std::string& suffix) {
    return name.size() >= suffix.size() &&
           name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  return ends_with(".weight") || ends_with(".v_y") || ends_with(".v_x");
}

}  // namespace

template <typename T>
Discriminator<T>::Discriminator(DiscriminatorSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)) {
  spec_.Validate();
  std::mt19937_64 rng(seed);
  const int k = spec_.num_classes;
  const int f = spec_.FeatureDim();
  auto add_conv = [&](const std::string& name, int out, int in, int kernel) {
    params_[name + ".weight"] = GlorotUniform<T>({out, in, kernel, kernel}, rng);
    params_[name + ".bias"] = Tensor<T>({out}, T(0));
  };
  auto add_linear = [&](const std::string& name, int out, int in) {
    params_[name + ".weight"] = GlorotUniform<T>({out, in}, rng);
    params_[name + ".bias"] = Tensor<T>({out}, T(0));
  };

  int in = spec_.image_shape.channels;
  for (int i = 0; i < spec_.num_down_blocks; ++i) {
    const int out = spec_.Width(i);
    add_conv(Block(i) + ".conv1", out, in, 3);
    add_conv(Block(i) + ".conv2", out, out, 3);
    if (in != out) add_conv(Block(i) + ".shortcut", out, in, 1);
    in = out;
  }
  add_linear("s_x", 1, f);
  add_linear("c_x", k, f);
  params_["proj.v_y"] = GlorotUniform<T>({1, f}, rng);
  params_["proj.v_x"] = GlorotUniform<T>({1, f}, rng);
  add_linear("c_y.fc1", spec_.y_head_hidden_dim, 1);
  add_linear("c_y.fc2", k, spec_.y_head_hidden_dim);

  for (const auto& name : NormalizedWeights()) {
    const int rows = params_.at(name).dim(0);
    buffers_[name + kPowerVector] = Tensor<T>({rows}, RandomUnitVector<T>(rows, rng));
  }
}

template <typename T>
Discriminator<T>::Discriminator(DiscriminatorSpec spec, TensorMap<T> params,
                                TensorMap<T> buffers)
    : spec_(std::move(spec)), params_(std::move(params)), buffers_(std::move(buffers)) {
  spec_.Validate();
}

template <typename T>
std::vector<std::string> Discriminator<T>::NormalizedWeights() const {
  std::vector<std::string> out;
  for (const auto& [name, value] : params_)
    if (IsNormalized(name)) out.push_back(name);
  return out;
}

template <typename T>
Var Discriminator<T>::Normalized(Tape<T>& tape, const Binding<T>& params,
                                 const std::string& name, const ForwardOptions& options) {
  const Var w = params[name];
  auto& u_buf = buffers_.at(name + kPowerVector);
  const auto it = PowerIterate(tape.value(w), u_buf.storage(),
                               options.update_state ? spec_.n_power_iterations : 0);
  if (options.update_state) {
    u_buf = Tensor<T>({static_cast<int>(it.u.size())}, it.u);
  }
  return SpectralNormWeight(tape, w, it.u, it.v);
}

template <typename T>
Var Discriminator<T>::Features(Tape<T>& tape, const Binding<T>& params, Var x,
                               const ForwardOptions& options) {
  const auto& xv = tape.value(x);
  const auto& shape = spec_.image_shape;
  if (xv.rank() != 4 || xv.dim(1) != shape.channels || xv.dim(2) != shape.height ||
      xv.dim(3) != shape.width) {
    throw std::invalid_argument("discriminator: input " + ShapeToString(xv.shape()) +
                                " does not match image_shape " + shape.ToString());
  }
  auto conv = [&](const std::string& name, Var h) {
    return Conv2d(tape, h, Normalized(tape, params, name + ".weight", options),
                  params[name + ".bias"]);
  };
  Var h = x;
  int in = shape.channels;
  for (int i = 0; i < spec_.num_down_blocks; ++i) {
    const std::string b = Block(i);
    const int out = spec_.Width(i);
    Var r = i == 0 ? h : Relu(tape, h);
    r = conv(b + ".conv1", r);
    r = Relu(tape, r);
    r = conv(b + ".conv2", r);
    r = AvgPool2x(tape, r);
    Var sc;
    if (i == 0) {
      // Optimized first block: pool before the 1x1 projection.
      sc = AvgPool2x(tape, h);
      if (in != out) sc = conv(b + ".shortcut", sc);
    } else {
      sc = in != out ? conv(b + ".shortcut", h) : h;
      sc = AvgPool2x(tape, sc);
    }
    h = Add(tape, r, sc);
    in = out;
  }
  return SumSpatial(tape, Relu(tape, h));
}

template <typename T>
DiscriminatorOutputs Discriminator<T>::Forward(Tape<T>& tape, const Binding<T>& params,
                                               Var x, Var y,
                                               const ForwardOptions& options) {
  const auto& yv = tape.value(y);
  const int n = tape.value(x).rank() > 0 ? tape.value(x).dim(0) : 0;
  if (static_cast<int>(yv.size()) != n) {
    throw std::invalid_argument("discriminator: " + std::to_string(yv.size()) +
                                " outcomes for " + std::to_string(n) + " images");
  }
  for (T v : yv.values()) {
    if (!(v >= T(-1) && v <= T(1))) {
      throw std::invalid_argument(
          "discriminator: outcome outside [-1, 1] (were the outcomes softened?)");
    }
  }
  DiscriminatorOutputs out;
  out.phi = Features(tape, params, x, options);
  out.s_x = Reshape(tape,
                    Linear(tape, out.phi, Normalized(tape, params, "s_x.weight", options),
                           params["s_x.bias"]),
                    {n});
  out.logits_c_given_x = Linear(tape, out.phi,
                                Normalized(tape, params, "c_x.weight", options),
                                params["c_x.bias"]);
  const Var y_flat = Reshape(tape, y, {n});
  out.s_joint = Projection(tape, out.phi, y_flat,
                           Normalized(tape, params, "proj.v_y", options),
                           Normalized(tape, params, "proj.v_x", options));
  Var hy = Reshape(tape, y, {n, 1});
  hy = Relu(tape, Linear(tape, hy, Normalized(tape, params, "c_y.fc1.weight", options),
                         params["c_y.fc1.bias"]));
  out.logits_c_given_y = Linear(tape, hy,
                                Normalized(tape, params, "c_y.fc2.weight", options),
                                params["c_y.fc2.bias"]);
  return out;
}

template class Discriminator<float>;
template class Discriminator<double>;

}  // namespace fairgan::nn
