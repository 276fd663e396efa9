// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_NN_OPS_H_
#define FAIRGAN_NN_OPS_H_

#include <span>
#include <vector>

#include "fairgan/nn/tape.h"
#include "fairgan/nn/tensor.h"

// Differentiable operations on a Tape. Image tensors are NCHW.
namespace fairgan::nn {

// y = x w^T + b; x [N, I], w [O, I], b [O] (optional).
template <typename T>
Var Linear(Tape<T>& tape, Var x, Var w, Var b = {});

// Stride-1 "same" convolution; x [N, C, H, W], w [O, C, K, K] with odd K,
// b [O] (optional).
template <typename T>
Var Conv2d(Tape<T>& tape, Var x, Var w, Var b = {});

template <typename T>
Var Relu(Tape<T>& tape, Var x);

template <typename T>
Var Tanh(Tape<T>& tape, Var x);

template <typename T>
Var Add(Tape<T>& tape, Var a, Var b);

template <typename T>
Var Scale(Tape<T>& tape, Var x, T factor);

template <typename T>
Var Reshape(Tape<T>& tape, Var x, Shape shape);

template <typename T>
Var UpsampleNearest2x(Tape<T>& tape, Var x);

template <typename T>
Var AvgPool2x(Tape<T>& tape, Var x);

// Sum over H and W: [N, C, H, W] -> [N, C].
template <typename T>
Var SumSpatial(Tape<T>& tape, Var x);

// Per-channel standardisation with batch statistics (biased variance) over
// N, H, W. Writes the batch mean and variance to the optional outputs.
template <typename T>
Var BatchNormTrain(Tape<T>& tape, Var x, T eps, Tensor<T>* batch_mean = nullptr,
                   Tensor<T>* batch_var = nullptr);

// Standardisation with fixed statistics (no gradient to the statistics).
template <typename T>
Var BatchNormEval(Tape<T>& tape, Var x, const Tensor<T>& mean,
                  const Tensor<T>& var, T eps);

// out[n, ch] = gamma[c_n, ch] * x[n, ch] + beta[c_n, ch]; gamma, beta [K, C].
template <typename T>
Var ClassAffine(Tape<T>& tape, Var x, Var gamma, Var beta,
                std::span<const int> classes);

// Row lookup: table [K, E] -> [N, E].
template <typename T>
Var Embedding(Tape<T>& tape, Var table, std::span<const int> classes);

// [N, A] ++ [N, B] -> [N, A + B].
template <typename T>
Var ConcatColumns(Tape<T>& tape, Var a, Var b);

// Rows [begin, end) along the leading dimension.
template <typename T>
Var SliceRows(Tape<T>& tape, Var x, int begin, int end);

// Concatenation along the leading dimension; shapes must agree elsewhere.
// Invalid or empty parts are skipped.
template <typename T>
Var ConcatRows(Tape<T>& tape, std::span<const Var> parts);

// W / sigma with sigma = u^T W v, u and v held constant. W is viewed as a
// matrix [dim0, rest]. Writes sigma to the optional output.
template <typename T>
Var SpectralNormWeight(Tape<T>& tape, Var w, const std::vector<T>& u,
                       const std::vector<T>& v, T* sigma_out = nullptr);

// f_n = y_n <v_y, phi_n> + <v_x, phi_n>; phi [N, F], y [N], v_y and v_x have F
// elements (any shape).
template <typename T>
Var Projection(Tape<T>& tape, Var phi, Var y, Var v_y, Var v_x);

// mean(max(0, 1 - real)) + mean(max(0, 1 + fake)); an empty side adds 0.
// Either Var may be invalid. Returns a [1] tensor.
template <typename T>
Var HingeDiscriminator(Tape<T>& tape, Var real, Var fake);

// -mean(fake).
template <typename T>
Var HingeGenerator(Tape<T>& tape, Var fake);

// Mean over the batch of weight_n * CE_n where CE_n = -log softmax(logits_n)
// at labels_n. With uniform_target the target distribution is uniform over
// classes instead of the one-hot label. Empty weights means all ones.
template <typename T>
Var SoftmaxCrossEntropy(Tape<T>& tape, Var logits, std::span<const int> labels,
                        std::span<const T> weights = {},
                        bool uniform_target = false);

// As SoftmaxCrossEntropy, with per-sample weights that are themselves
// differentiable (weights [N]).
template <typename T>
Var WeightedCrossEntropy(Tape<T>& tape, Var logits, std::span<const int> labels,
                         Var weights, bool uniform_target = false);

// clamp((y / magnitude + 1) / 2, 0, 1) elementwise.
template <typename T>
Var GateWeight(Tape<T>& tape, Var y, T magnitude);

// Sum of single-element values.
template <typename T>
Var AddScalars(Tape<T>& tape, std::span<const Var> terms);

}  // namespace fairgan::nn

#endif  // FAIRGAN_NN_OPS_H_
