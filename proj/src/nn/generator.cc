// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include "fairgan/nn/generator.h"

#include <random>
#include <stdexcept>
#include <string>

#include "fairgan/nn/ops.h"

namespace fairgan::nn {
namespace {

std::string Block(int i) { return "block" + std::to_string(i); }

}  // namespace

template <typename T>
Generator<T>::Generator(GeneratorSpec spec, std::uint64_t seed) : spec_(std::move(spec)) {
  spec_.Validate();
  std::mt19937_64 rng(seed);
  const int k = spec_.num_classes;
  const int s = spec_.InitialSize();
  const int w0 = spec_.Width(0);

  auto add_cbn = [&](const std::string& name, int channels) {
    params_[name + ".gamma"] = Tensor<T>({k, channels}, T(1));
    params_[name + ".beta"] = Tensor<T>({k, channels}, T(0));
    buffers_[name + ".running_mean"] = Tensor<T>({channels}, T(0));
    buffers_[name + ".running_var"] = Tensor<T>({channels}, T(1));
  };
  auto add_conv = [&](const std::string& name, int out, int in, int kernel) {
    params_[name + ".weight"] = GlorotUniform<T>({out, in, kernel, kernel}, rng);
    params_[name + ".bias"] = Tensor<T>({out}, T(0));
  };
  auto add_linear = [&](const std::string& name, int out, int in) {
    params_[name + ".weight"] = GlorotUniform<T>({out, in}, rng);
    params_[name + ".bias"] = Tensor<T>({out}, T(0));
  };

  add_linear("fc", w0 * s * s, spec_.noise_dim);
  for (int i = 0; i < spec_.num_up_blocks; ++i) {
    const int in = spec_.Width(i), out = spec_.Width(i + 1);
    add_cbn(Block(i) + ".bn1", in);
    add_conv(Block(i) + ".conv1", out, in, 3);
    add_cbn(Block(i) + ".bn2", out);
    add_conv(Block(i) + ".conv2", out, out, 3);
    if (in != out) add_conv(Block(i) + ".shortcut", out, in, 1);
  }
  add_cbn("out_bn", spec_.Width(spec_.num_up_blocks));
  add_conv("out_conv", spec_.image_shape.channels, spec_.Width(spec_.num_up_blocks), 3);

  int outcome_in = spec_.noise_dim;
  if (spec_.outcome_conditioning == OutcomeConditioning::kClassEmbed) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Tensor<T> embed({k, spec_.class_embed_dim});
    for (auto& v : embed.values()) v = static_cast<T>(normal(rng));
    params_["y_embed.weight"] = std::move(embed);
    outcome_in += spec_.class_embed_dim;
  }
  add_linear("y_fc1", spec_.outcome_hidden_dim, outcome_in);
  add_linear("y_fc2", 1, spec_.outcome_hidden_dim);
}

template <typename T>
Generator<T>::Generator(GeneratorSpec spec, TensorMap<T> params, TensorMap<T> buffers)
    : spec_(std::move(spec)), params_(std::move(params)), buffers_(std::move(buffers)) {
  spec_.Validate();
}

template <typename T>
Var Generator<T>::Cbn(Tape<T>& tape, const Binding<T>& params, const std::string& name,
                      Var x, std::span<const int> classes, const ForwardOptions& options) {
  return ConditionalBatchNorm(tape, x, params[name + ".gamma"], params[name + ".beta"],
                              classes, options, buffers_.at(name + ".running_mean"),
                              buffers_.at(name + ".running_var"),
                              static_cast<T>(spec_.bn_eps),
                              static_cast<T>(spec_.bn_momentum));
}

template <typename T>
typename Generator<T>::Outputs Generator<T>::Forward(Tape<T>& tape,
                                                     const Binding<T>& params,
                                                     std::span<const int> classes, Var z,
                                                     const ForwardOptions& options) {
  const auto& zv = tape.value(z);
  if (zv.rank() != 2 || zv.dim(1) != spec_.noise_dim) {
    throw std::invalid_argument("generator: z must be [N, " +
                                std::to_string(spec_.noise_dim) + "], got " +
                                ShapeToString(zv.shape()));
  }
  const int n = zv.dim(0);
  if (static_cast<int>(classes.size()) != n) {
    throw std::invalid_argument("generator: " + std::to_string(classes.size()) +
                                " classes for a noise batch of " + std::to_string(n));
  }
  for (int c : classes) {
    if (c < 0 || c >= spec_.num_classes) {
      throw std::invalid_argument("generator: class index " + std::to_string(c) +
                                  " out of range");
    }
  }

  const int s = spec_.InitialSize();
  Var h = Linear(tape, z, params["fc.weight"], params["fc.bias"]);
  h = Reshape(tape, h, {n, spec_.Width(0), s, s});
  for (int i = 0; i < spec_.num_up_blocks; ++i) {
    const std::string b = Block(i);
    Var r = Cbn(tape, params, b + ".bn1", h, classes, options);
    r = Relu(tape, r);
    r = UpsampleNearest2x(tape, r);
    r = Conv2d(tape, r, params[b + ".conv1.weight"], params[b + ".conv1.bias"]);
    r = Cbn(tape, params, b + ".bn2", r, classes, options);
    r = Relu(tape, r);
    r = Conv2d(tape, r, params[b + ".conv2.weight"], params[b + ".conv2.bias"]);
    Var sc = UpsampleNearest2x(tape, h);
    if (spec_.Width(i) != spec_.Width(i + 1)) {
      sc = Conv2d(tape, sc, params[b + ".shortcut.weight"], params[b + ".shortcut.bias"]);
    }
    h = Add(tape, r, sc);
  }
  h = Cbn(tape, params, "out_bn", h, classes, options);
  h = Relu(tape, h);
  h = Conv2d(tape, h, params["out_conv.weight"], params["out_conv.bias"]);
  const Var x_fake = Tanh(tape, h);

  Var in = z;
  if (spec_.outcome_conditioning == OutcomeConditioning::kClassEmbed) {
    in = ConcatColumns(tape, z, Embedding(tape, params["y_embed.weight"], classes));
  }
  Var y = Relu(tape, Linear(tape, in, params["y_fc1.weight"], params["y_fc1.bias"]));
  y = Tanh(tape, Linear(tape, y, params["y_fc2.weight"], params["y_fc2.bias"]));
  return {x_fake, Reshape(tape, y, {n})};
}

template <typename T>
std::pair<Tensor<T>, Tensor<T>> Generator<T>::Sample(std::span<const int> classes,
                                                     const Tensor<T>& z,
                                                     const ForwardOptions& options) {
  Tape<T> tape(/*record=*/false);
  Binding<T> bound(tape, params_, /*trainable=*/false);
  const Var zv = tape.Constant(z);
  const auto out = Forward(tape, bound, classes, zv, options);
  return {tape.value(out.x_fake), tape.value(out.y_fake)};
}

template class Generator<float>;
template class Generator<double>;

}  // namespace fairgan::nn
