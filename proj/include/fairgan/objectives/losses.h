// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_OBJECTIVES_LOSSES_H_
#define FAIRGAN_OBJECTIVES_LOSSES_H_

#include <span>

#include "fairgan/nn/tensor.h"

// Scalar forms of the adversarial and classification losses, evaluated
// without recording gradients. They share code with the graph ops used in
// training.
namespace fairgan::objectives {

// mean(max(0, 1 - real)) + mean(max(0, 1 + fake)); an empty side adds 0.
double HingeDSource(std::span<const double> real, std::span<const double> fake);

// -mean(fake). Rejects an empty batch.
double HingeGSource(std::span<const double> fake);

// Mean softmax cross-entropy of logits [N, K] against labels in [0, K).
double ClassCrossEntropy(const nn::Tensor<double>& logits, std::span<const int> labels);

// Cross-entropy against the uniform distribution over the K classes.
double UniformCrossEntropy(const nn::Tensor<double>& logits);

// Weight given to a generated sample in the equal-opportunity term:
// clamp((y_soft / magnitude + 1) / 2, 0, 1). A softened positive (y = m)
// maps to 1 and a softened negative (y = -m) to 0.
double GateWeight(double y_soft, double magnitude = 0.8);

}  // namespace fairgan::objectives

#endif  // FAIRGAN_OBJECTIVES_LOSSES_H_
