// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include "fairgan/nn/ops.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support/grad_check.h"

namespace fairgan::nn {
namespace {

using testing::CheckGradients;
using testing::RandomTensor;
using Vars = std::map<std::string, Var>;

constexpr double kTol = 1e-4;

// Reference convolution by direct summation.
Tensor<double> NaiveConv(const Tensor<double>& x, const Tensor<double>& w,
                         const Tensor<double>& b) {
  const int N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  const int O = w.dim(0), K = w.dim(2), P = K / 2;
  Tensor<double> out({N, O, H, W});
  for (int n = 0; n < N; ++n)
    for (int o = 0; o < O; ++o)
      for (int i = 0; i < H; ++i)
        for (int j = 0; j < W; ++j) {
          double acc = b[o];
          for (int c = 0; c < C; ++c)
            for (int ki = 0; ki < K; ++ki)
              for (int kj = 0; kj < K; ++kj) {
                const int ii = i + ki - P, jj = j + kj - P;
                if (ii < 0 || jj < 0 || ii >= H || jj >= W) continue;
                acc += x[((n * C + c) * H + ii) * W + jj] * w[((o * C + c) * K + ki) * K + kj];
              }
          out[((n * O + o) * H + i) * W + j] = acc;
        }
  return out;
}

TEST(OpsTest, Conv2dMatchesDirectSummation) {
  std::mt19937_64 rng(1);
  for (int k : {1, 3, 5}) {
    const auto x = RandomTensor({2, 3, 5, 6}, rng);
    const auto w = RandomTensor({4, 3, k, k}, rng);
    const auto b = RandomTensor({4}, rng);
    Tape<double> tape(false);
    const Var y = Conv2d(tape, tape.Constant(x), tape.Constant(w), tape.Constant(b));
    const auto expected = NaiveConv(x, w, b);
    ASSERT_EQ(tape.shape(y), expected.shape());
    for (std::size_t i = 0; i < expected.size(); ++i)
      EXPECT_NEAR(tape.value(y)[i], expected[i], 1e-12) << "k=" << k;
  }
}

TEST(OpsTest, LinearValue) {
  Tape<double> tape(false);
  const Var x = tape.Constant(Tensor<double>({1, 2}, {1, 2}));
  const Var w = tape.Constant(Tensor<double>({2, 2}, {1, 0, 3, -1}));
  const Var b = tape.Constant(Tensor<double>({2}, {0.5, 0}));
  const Var y = Linear(tape, x, w, b);
  EXPECT_DOUBLE_EQ(tape.value(y)[0], 1.5);
  EXPECT_DOUBLE_EQ(tape.value(y)[1], 1.0);
}

TEST(OpsTest, PoolingAndUpsampling) {
  Tape<double> tape(false);
  const Var x = tape.Constant(Tensor<double>({1, 1, 2, 2}, {1, 2, 3, 4}));
  const Var up = UpsampleNearest2x(tape, x);
  EXPECT_EQ(tape.shape(up), (Shape{1, 1, 4, 4}));
  EXPECT_DOUBLE_EQ(tape.value(up)[5], 1);
  EXPECT_DOUBLE_EQ(tape.value(up)[15], 4);
  const Var down = AvgPool2x(tape, up);
  EXPECT_EQ(tape.value(down), tape.value(x));
  EXPECT_DOUBLE_EQ(tape.value(SumSpatial(tape, x))[0], 10);
}

TEST(OpsTest, ProjectionExamples) {
  Tape<double> tape(false);
  const Var phi = tape.Constant(Tensor<double>({1, 3}, {1, 1, 1}));
  const Var ones = tape.Constant(Tensor<double>({3}, {1, 1, 1}));
  const Var y = tape.Constant(Tensor<double>({1}, {0.5}));
  EXPECT_DOUBLE_EQ(tape.value(Projection(tape, phi, y, ones, ones))[0], 4.5);

  std::mt19937_64 rng(3);
  const auto p = RandomTensor({5, 4}, rng);
  const auto vy = RandomTensor({4}, rng);
  const auto vx = RandomTensor({4}, rng);
  const Var pv = tape.Constant(p), vyv = tape.Constant(vy), vxv = tape.Constant(vx);
  const Var zero = tape.Constant(Tensor<double>({5}));
  const auto f0 = tape.value(Projection(tape, pv, zero, vyv, vxv));
  const auto y1 = RandomTensor({5}, rng), y2 = RandomTensor({5}, rng);
  const auto f1 = tape.value(Projection(tape, pv, tape.Constant(y1), vyv, vxv));
  const auto f2 = tape.value(Projection(tape, pv, tape.Constant(y2), vyv, vxv));
  for (int n = 0; n < 5; ++n) {
    double vx_phi = 0, vy_phi = 0;
    for (int f = 0; f < 4; ++f) {
      vx_phi += vx[f] * p[n * 4 + f];
      vy_phi += vy[f] * p[n * 4 + f];
    }
    EXPECT_DOUBLE_EQ(f0[n], vx_phi);
    EXPECT_NEAR(f1[n] - f2[n], (y1[n] - y2[n]) * vy_phi, 1e-12);
  }
}

TEST(OpsTest, ProjectionRejectsDimensionMismatch) {
  Tape<double> tape(false);
  const Var phi = tape.Constant(Tensor<double>({1, 3}));
  const Var v3 = tape.Constant(Tensor<double>({3}));
  const Var v2 = tape.Constant(Tensor<double>({2}));
  const Var y = tape.Constant(Tensor<double>({1}));
  EXPECT_THROW(Projection(tape, phi, y, v2, v3), std::invalid_argument);
}

TEST(OpsTest, BatchNormTrainHandExample) {
  Tape<double> tape(false);
  const Var x = tape.Constant(Tensor<double>({2, 1, 1, 1}, {1, 3}));
  const Var y = BatchNormTrain(tape, x, 0.0);
  EXPECT_DOUBLE_EQ(tape.value(y)[0], -1);
  EXPECT_DOUBLE_EQ(tape.value(y)[1], 1);
}

TEST(OpsTest, CrossEntropyAndHingeValues) {
  Tape<double> tape(false);
  const Var l = tape.Constant(Tensor<double>({1, 2}, {std::log(3.0), 0}));
  const int label[] = {0};
  EXPECT_NEAR(tape.value(SoftmaxCrossEntropy<double>(tape, l, label))[0], -std::log(0.75),
              1e-12);
  const Var r = tape.Constant(Tensor<double>({2}, {2, 0.5}));
  const Var f = tape.Constant(Tensor<double>({2}, {-2, 0}));
  EXPECT_DOUBLE_EQ(tape.value(HingeDiscriminator(tape, r, f))[0], 0.75);
  const Var bad = tape.Constant(Tensor<double>({1}, {NAN}));
  EXPECT_THROW(HingeDiscriminator(tape, bad, f), std::invalid_argument);
  EXPECT_THROW(HingeGenerator(tape, bad), std::invalid_argument);
}

TEST(OpsTest, WeightedCrossEntropyReducesToWeightedMean) {
  std::mt19937_64 rng(5);
  const auto logits = RandomTensor({4, 3}, rng);
  const std::vector<double> w = {0.1, 0.0, 1.0, 0.7};
  const int labels[] = {0, 2, 1, 1};
  Tape<double> tape(false);
  const Var lv = tape.Constant(logits);
  const double fixed =
      tape.value(SoftmaxCrossEntropy<double>(tape, lv, labels, std::span<const double>(w)))[0];
  const double var_w = tape.value(
      WeightedCrossEntropy(tape, lv, labels, tape.Constant(Tensor<double>({4}, w))))[0];
  EXPECT_NEAR(fixed, var_w, 1e-14);
}

TEST(OpsTest, GateWeightClamps) {
  Tape<double> tape(false);
  const Var y = tape.Constant(Tensor<double>({5}, {0.8, -0.8, 0.0, 0.95, -0.95}));
  const auto g = tape.value(GateWeight(tape, y, 0.8));
  EXPECT_NEAR(g[0], 1.0, 1e-15);
  EXPECT_NEAR(g[1], 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(g[2], 0.5);
  EXPECT_DOUBLE_EQ(g[3], 1.0);
  EXPECT_DOUBLE_EQ(g[4], 0.0);
}

TEST(OpsTest, ConcatAndSliceRoundTrip) {
  std::mt19937_64 rng(2);
  const auto a = RandomTensor({2, 3}, rng), b = RandomTensor({1, 3}, rng);
  Tape<double> tape(false);
  const Var parts[] = {tape.Constant(a), Var{}, tape.Constant(b)};
  const Var cat = ConcatRows(tape, std::span<const Var>(parts));
  EXPECT_EQ(tape.shape(cat), (Shape{3, 3}));
  EXPECT_EQ(tape.value(SliceRows(tape, cat, 0, 2)), a);
  EXPECT_EQ(tape.value(SliceRows(tape, cat, 2, 3)), b);
}

// Gradient checks, one op at a time. Each loss ends in a random linear
// functional so that every output element carries a distinct weight.
Var Readout(Tape<double>& tape, Var y, unsigned seed) {
  std::mt19937_64 rng(seed);
  const int size = static_cast<int>(NumElements(tape.shape(y)));
  const Var r = tape.Constant(RandomTensor({1, size}, rng));
  return Reshape(tape, Linear(tape, r, Reshape(tape, y, {1, size})), {1});
}

TEST(OpsGradTest, LinearAndConv) {
  std::mt19937_64 rng(11);
  TensorMap<double> in = {{"x", RandomTensor({3, 4}, rng)},
                          {"w", RandomTensor({5, 4}, rng)},
                          {"b", RandomTensor({5}, rng)},
                          {"ix", RandomTensor({2, 2, 4, 4}, rng)},
                          {"k", RandomTensor({3, 2, 3, 3}, rng)},
                          {"kb", RandomTensor({3}, rng)}};
  const auto r = CheckGradients(in, [](Tape<double>& t, const Vars& v) {
    const Var a = Readout(t, Linear(t, v.at("x"), v.at("w"), v.at("b")), 1);
    const Var c = Readout(t, Conv2d(t, v.at("ix"), v.at("k"), v.at("kb")), 2);
    const Var terms[] = {a, c};
    return AddScalars(t, std::span<const Var>(terms));
  });
  EXPECT_LT(r.max_rel_error, kTol) << r.worst;
}

TEST(OpsGradTest, ElementwiseAndResampling) {
  std::mt19937_64 rng(12);
  TensorMap<double> in = {{"x", RandomTensor({2, 2, 4, 4}, rng)},
                          {"y", RandomTensor({2, 2, 4, 4}, rng)}};
  const auto r = CheckGradients(in, [](Tape<double>& t, const Vars& v) {
    Var h = Add(t, Relu(t, v.at("x")), Tanh(t, v.at("y")));
    h = Scale(t, h, 1.5);
    h = AvgPool2x(t, UpsampleNearest2x(t, h));
    h = AvgPool2x(t, h);
    const Var s = SumSpatial(t, h);
    return Readout(t, s, 3);
  });
  EXPECT_LT(r.max_rel_error, kTol) << r.worst;
}

TEST(OpsGradTest, BatchNormAndClassAffine) {
  std::mt19937_64 rng(13);
  TensorMap<double> in = {{"x", RandomTensor({4, 3, 2, 2}, rng)},
                          {"g", RandomTensor({2, 3}, rng)},
                          {"b", RandomTensor({2, 3}, rng)}};
  const int classes[] = {0, 1, 1, 0};
  const auto r = CheckGradients(in, [&](Tape<double>& t, const Vars& v) {
    const Var n = BatchNormTrain(t, v.at("x"), 1e-5);
    return Readout(t, ClassAffine(t, n, v.at("g"), v.at("b"), classes), 4);
  });
  EXPECT_LT(r.max_rel_error, kTol) << r.worst;
}

TEST(OpsGradTest, EmbeddingConcatSlice) {
  std::mt19937_64 rng(14);
  TensorMap<double> in = {{"table", RandomTensor({2, 3}, rng)},
                          {"z", RandomTensor({3, 2}, rng)}};
  const int classes[] = {1, 0, 1};
  const auto r = CheckGradients(in, [&](Tape<double>& t, const Vars& v) {
    const Var cat = ConcatColumns(t, v.at("z"), Embedding(t, v.at("table"), classes));
    const Var parts[] = {SliceRows(t, cat, 1, 3), cat};
    return Readout(t, ConcatRows(t, std::span<const Var>(parts)), 5);
  });
  EXPECT_LT(r.max_rel_error, kTol) << r.worst;
}

TEST(OpsGradTest, ProjectionLogit) {
  std::mt19937_64 rng(15);
  TensorMap<double> in = {{"phi", RandomTensor({3, 4}, rng)},
                          {"y", RandomTensor({3}, rng, 0.5)},
                          {"vy", RandomTensor({4}, rng)},
                          {"vx", RandomTensor({4}, rng)}};
  const auto r = CheckGradients(in, [](Tape<double>& t, const Vars& v) {
    return Readout(t, Projection(t, v.at("phi"), v.at("y"), v.at("vy"), v.at("vx")), 6);
  });
  EXPECT_LT(r.max_rel_error, kTol) << r.worst;
}

TEST(OpsGradTest, SpectralNormWeightWithDerivedVectors) {
  // u fixed, v = W^T u / |W^T u|: then sigma = |W^T u| and the constant-u,v
  // backward rule is the exact derivative.
  std::mt19937_64 rng(16);
  const auto u0 = RandomTensor({3}, rng);
  double nu = 0;
  for (double e : u0.values()) nu += e * e;
  std::vector<double> u(u0.storage());
  for (auto& e : u) e /= std::sqrt(nu);
  TensorMap<double> in = {{"w", RandomTensor({3, 2, 2}, rng)}};
  const auto r = CheckGradients(in, [&](Tape<double>& t, const Vars& v) {
    const auto& w = t.value(v.at("w"));
    std::vector<double> vv(4, 0.0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 4; ++j) vv[j] += w[i * 4 + j] * u[i];
    double n = 0;
    for (double e : vv) n += e * e;
    for (auto& e : vv) e /= std::sqrt(n);
    return Readout(t, SpectralNormWeight(t, v.at("w"), u, vv), 7);
  });
  EXPECT_LT(r.max_rel_error, kTol) << r.worst;
}

TEST(OpsGradTest, LossesAndGate) {
  std::mt19937_64 rng(17);
  TensorMap<double> in = {{"real", RandomTensor({5}, rng, 2)},
                          {"fake", RandomTensor({5}, rng, 2)},
                          {"logits", RandomTensor({5, 3}, rng)},
                          {"y", RandomTensor({5}, rng, 0.4)}};
  const int labels[] = {0, 1, 2, 2, 1};
  const auto r = CheckGradients(in, [&](Tape<double>& t, const Vars& v) {
    const Var gate = GateWeight(t, v.at("y"), 0.8);
    const Var terms[] = {
        HingeDiscriminator(t, v.at("real"), v.at("fake")),
        HingeGenerator(t, v.at("fake")),
        SoftmaxCrossEntropy<double>(t, v.at("logits"), labels),
        SoftmaxCrossEntropy<double>(t, v.at("logits"), {}, {}, true),
        WeightedCrossEntropy(t, v.at("logits"), labels, gate),
        Scale(t, WeightedCrossEntropy(t, v.at("logits"), labels, gate, true), -0.5)};
    return AddScalars(t, std::span<const Var>(terms));
  });
  EXPECT_LT(r.max_rel_error, kTol) << r.worst;
}

}  // namespace
}  // namespace fairgan::nn
