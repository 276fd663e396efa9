// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include "fairgan/objectives/losses.h"

#include <vector>

#include "fairgan/nn/ops.h"
#include "fairgan/nn/tape.h"

namespace fairgan::objectives {
namespace {

nn::Tensor<double> Vector(std::span<const double> v) {
  return nn::Tensor<double>({static_cast<int>(v.size())},
                            std::vector<double>(v.begin(), v.end()));
}

}  // namespace

double HingeDSource(std::span<const double> real, std::span<const double> fake) {
  nn::Tape<double> tape(false);
  const nn::Var r = tape.Constant(Vector(real));
  const nn::Var f = tape.Constant(Vector(fake));
  return tape.value(nn::HingeDiscriminator(tape, r, f))[0];
}

double HingeGSource(std::span<const double> fake) {
  nn::Tape<double> tape(false);
  return tape.value(nn::HingeGenerator(tape, tape.Constant(Vector(fake))))[0];
}

double ClassCrossEntropy(const nn::Tensor<double>& logits, std::span<const int> labels) {
  nn::Tape<double> tape(false);
  return tape.value(nn::SoftmaxCrossEntropy(tape, tape.Constant(logits), labels))[0];
}

double UniformCrossEntropy(const nn::Tensor<double>& logits) {
  nn::Tape<double> tape(false);
  return tape.value(
      nn::SoftmaxCrossEntropy<double>(tape, tape.Constant(logits), {}, {}, true))[0];
}

double GateWeight(double y_soft, double magnitude) {
  nn::Tape<double> tape(false);
  const nn::Var y = tape.Constant(nn::Tensor<double>({1}, {y_soft}));
  return tape.value(nn::GateWeight(tape, y, magnitude))[0];
}

}  // namespace fairgan::objectives
