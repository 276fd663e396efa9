// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include "fairgan/nn/ops.h"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fairgan::nn {
namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapMat = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMapMat = Eigen::Map<const RowMat<T>>;

void Require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

template <typename T>
void AddInto(Tensor<T>& dst, const Tensor<T>& src) {
  T* d = dst.data();
  const T* s = src.data();
  for (std::size_t i = 0; i < src.size(); ++i) d[i] += s[i];
}

// Upper bound on the im2col scratch buffer, in elements.
constexpr std::size_t kColBudget = std::size_t{1} << 23;

template <typename T>
void Im2Col(const T* x, int C, int H, int W, int K, int n_count, T* cols) {
  const int P = K / 2;
  const int HW = H * W;
  const std::size_t width = static_cast<std::size_t>(n_count) * HW;
  for (int c = 0; c < C; ++c) {
    for (int ky = 0; ky < K; ++ky) {
      for (int kx = 0; kx < K; ++kx) {
        T* row = cols + static_cast<std::size_t>((c * K + ky) * K + kx) * width;
        for (int n = 0; n < n_count; ++n) {
          const T* plane = x + (static_cast<std::size_t>(n) * C + c) * HW;
          T* dst = row + static_cast<std::size_t>(n) * HW;
          const int dx = kx - P;
          const int x_lo = std::max(0, -dx);
          const int x_hi = std::min(W, W - dx);
          for (int yy = 0; yy < H; ++yy) {
            const int iy = yy + ky - P;
            T* out_row = dst + yy * W;
            if (iy < 0 || iy >= H || x_lo >= x_hi) {
              std::fill(out_row, out_row + W, T(0));
              continue;
            }
            const T* in_row = plane + iy * W;
            std::fill(out_row, out_row + x_lo, T(0));
            std::copy(in_row + x_lo + dx, in_row + x_hi + dx, out_row + x_lo);
            std::fill(out_row + x_hi, out_row + W, T(0));
          }
        }
      }
    }
  }
}

template <typename T>
void Col2ImAdd(const T* cols, int C, int H, int W, int K, int n_count, T* dx_out) {
  const int P = K / 2;
  const int HW = H * W;
  const std::size_t width = static_cast<std::size_t>(n_count) * HW;
  for (int c = 0; c < C; ++c) {
    for (int ky = 0; ky < K; ++ky) {
      for (int kx = 0; kx < K; ++kx) {
        const T* row = cols + static_cast<std::size_t>((c * K + ky) * K + kx) * width;
        for (int n = 0; n < n_count; ++n) {
          T* plane = dx_out + (static_cast<std::size_t>(n) * C + c) * HW;
          const T* src = row + static_cast<std::size_t>(n) * HW;
          const int dx = kx - P;
          const int x_lo = std::max(0, -dx);
          const int x_hi = std::min(W, W - dx);
          for (int yy = 0; yy < H; ++yy) {
            const int iy = yy + ky - P;
            if (iy < 0 || iy >= H) continue;
            T* in_row = plane + iy * W;
            const T* s = src + yy * W;
            for (int xx = x_lo; xx < x_hi; ++xx) in_row[xx + dx] += s[xx];
          }
        }
      }
    }
  }
}

}  // namespace

template <typename T>
Var Linear(Tape<T>& tape, Var x, Var w, Var b) {
  const auto& xv = tape.value(x);
  const auto& wv = tape.value(w);
  Require(xv.rank() == 2 && wv.rank() == 2 && xv.dim(1) == wv.dim(1),
          "Linear: shape mismatch " + ShapeToString(xv.shape()) + " x " +
              ShapeToString(wv.shape()));
  const int N = xv.dim(0), I = xv.dim(1), O = wv.dim(0);
  Tensor<T> out({N, O});
  MapMat<T> y(out.data(), N, O);
  ConstMapMat<T> xm(xv.data(), N, I);
  ConstMapMat<T> wm(wv.data(), O, I);
  y.noalias() = xm * wm.transpose();
  if (b.valid()) {
    const auto& bv = tape.value(b);
    Require(static_cast<int>(bv.size()) == O, "Linear: bias size");
    for (int n = 0; n < N; ++n)
      for (int o = 0; o < O; ++o) y(n, o) += bv[static_cast<std::size_t>(o)];
  }
  return tape.Emit(std::move(out), {x, w, b},
                   [x, w, b, N, I, O](Tape<T>& t, const Tensor<T>& g) {
                     ConstMapMat<T> gm(g.data(), N, O);
                     if (t.requires_grad(x)) {
                       MapMat<T> dx(t.GradBuffer(x).data(), N, I);
                       dx.noalias() += gm * ConstMapMat<T>(t.value(w).data(), O, I);
                     }
                     if (t.requires_grad(w)) {
                       MapMat<T> dw(t.GradBuffer(w).data(), O, I);
                       dw.noalias() +=
                           gm.transpose() * ConstMapMat<T>(t.value(x).data(), N, I);
                     }
                     if (b.valid() && t.requires_grad(b)) {
                       auto& db = t.GradBuffer(b);
                       for (int n = 0; n < N; ++n)
                         for (int o = 0; o < O; ++o)
                           db[static_cast<std::size_t>(o)] += gm(n, o);
                     }
                   });
}

template <typename T>
Var Conv2d(Tape<T>& tape, Var x, Var w, Var b) {
  const auto& xv = tape.value(x);
  const auto& wv = tape.value(w);
  Require(xv.rank() == 4 && wv.rank() == 4 && xv.dim(1) == wv.dim(1) &&
              wv.dim(2) == wv.dim(3) && wv.dim(2) % 2 == 1,
          "Conv2d: shape mismatch " + ShapeToString(xv.shape()) + " * " +
              ShapeToString(wv.shape()));
  const int N = xv.dim(0), C = xv.dim(1), H = xv.dim(2), W = xv.dim(3);
  const int O = wv.dim(0), K = wv.dim(2);
  const int CKK = C * K * K, HW = H * W;
  const int chunk = std::max<int>(
      1, static_cast<int>(kColBudget / (static_cast<std::size_t>(CKK) * HW)));

  Tensor<T> out({N, O, H, W});
  ConstMapMat<T> wm(wv.data(), O, CKK);
  std::vector<T> cols;
  RowMat<T> res;
  for (int n0 = 0; n0 < N; n0 += chunk) {
    const int nc = std::min(chunk, N - n0);
    cols.resize(static_cast<std::size_t>(CKK) * nc * HW);
    Im2Col(xv.data() + static_cast<std::size_t>(n0) * C * HW, C, H, W, K, nc,
           cols.data());
    res.noalias() = wm * ConstMapMat<T>(cols.data(), CKK,
                                        static_cast<Eigen::Index>(nc) * HW);
    for (int n = 0; n < nc; ++n) {
      for (int o = 0; o < O; ++o) {
        T* dst = out.data() + (static_cast<std::size_t>(n0 + n) * O + o) * HW;
        const T bias = b.valid() ? tape.value(b)[static_cast<std::size_t>(o)] : T(0);
        for (int k = 0; k < HW; ++k) dst[k] = res(o, n * HW + k) + bias;
      }
    }
  }
  return tape.Emit(
      std::move(out), {x, w, b},
      [x, w, b, N, C, H, W, O, K, CKK, HW, chunk](Tape<T>& t, const Tensor<T>& g) {
        const bool need_x = t.requires_grad(x);
        const bool need_w = t.requires_grad(w);
        if (b.valid() && t.requires_grad(b)) {
          auto& db = t.GradBuffer(b);
          for (int n = 0; n < N; ++n)
            for (int o = 0; o < O; ++o) {
              const T* src = g.data() + (static_cast<std::size_t>(n) * O + o) * HW;
              T acc = 0;
              for (int k = 0; k < HW; ++k) acc += src[k];
              db[static_cast<std::size_t>(o)] += acc;
            }
        }
        if (!need_x && !need_w) return;
        const auto& xval = t.value(x);
        ConstMapMat<T> wmat(t.value(w).data(), O, CKK);
        std::vector<T> cols;
        RowMat<T> gm;
        RowMat<T> dcols;
        for (int n0 = 0; n0 < N; n0 += chunk) {
          const int nc = std::min(chunk, N - n0);
          const Eigen::Index width = static_cast<Eigen::Index>(nc) * HW;
          gm.resize(O, width);
          for (int n = 0; n < nc; ++n)
            for (int o = 0; o < O; ++o) {
              const T* src = g.data() + (static_cast<std::size_t>(n0 + n) * O + o) * HW;
              for (int k = 0; k < HW; ++k) gm(o, n * HW + k) = src[k];
            }
          if (need_w) {
            cols.resize(static_cast<std::size_t>(CKK) * width);
            Im2Col(xval.data() + static_cast<std::size_t>(n0) * C * HW, C, H, W, K,
                   nc, cols.data());
            MapMat<T> dw(t.GradBuffer(w).data(), O, CKK);
            dw.noalias() += gm * ConstMapMat<T>(cols.data(), CKK, width).transpose();
          }
          if (need_x) {
            dcols.noalias() = wmat.transpose() * gm;
            Col2ImAdd(dcols.data(), C, H, W, K, nc,
                      t.GradBuffer(x).data() + static_cast<std::size_t>(n0) * C * HW);
          }
        }
      });
}

template <typename T>
Var Relu(Tape<T>& tape, Var x) {
  Tensor<T> out = tape.value(x);
  for (auto& v : out.values()) v = v > T(0) ? v : T(0);
  return tape.Emit(std::move(out), {x}, [x](Tape<T>& t, const Tensor<T>& g) {
    const auto& xv = t.value(x);
    auto& dx = t.GradBuffer(x);
    for (std::size_t i = 0; i < g.size(); ++i)
      if (xv[i] > T(0)) dx[i] += g[i];
  });
}

template <typename T>
Var Tanh(Tape<T>& tape, Var x) {
  Tensor<T> out = tape.value(x);
  for (auto& v : out.values()) v = std::tanh(v);
  const Var self = tape.NextVar();
  return tape.Emit(std::move(out), {x}, [x, self](Tape<T>& t, const Tensor<T>& g) {
    const auto& y = t.value(self);
    auto& dx = t.GradBuffer(x);
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] += g[i] * (T(1) - y[i] * y[i]);
  });
}

template <typename T>
Var Add(Tape<T>& tape, Var a, Var b) {
  const auto& av = tape.value(a);
  const auto& bv = tape.value(b);
  Require(av.shape() == bv.shape(), "Add: shape mismatch " +
                                        ShapeToString(av.shape()) + " + " +
                                        ShapeToString(bv.shape()));
  Tensor<T> out = av;
  AddInto(out, bv);
  return tape.Emit(std::move(out), {a, b}, [a, b](Tape<T>& t, const Tensor<T>& g) {
    if (t.requires_grad(a)) AddInto(t.GradBuffer(a), g);
    if (t.requires_grad(b)) AddInto(t.GradBuffer(b), g);
  });
}

template <typename T>
Var Scale(Tape<T>& tape, Var x, T factor) {
  Tensor<T> out = tape.value(x);
  for (auto& v : out.values()) v *= factor;
  return tape.Emit(std::move(out), {x}, [x, factor](Tape<T>& t, const Tensor<T>& g) {
    auto& dx = t.GradBuffer(x);
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] += factor * g[i];
  });
}

template <typename T>
Var Reshape(Tape<T>& tape, Var x, Shape shape) {
  Tensor<T> out = tape.value(x).Reshaped(std::move(shape));
  return tape.Emit(std::move(out), {x}, [x](Tape<T>& t, const Tensor<T>& g) {
    auto& dx = t.GradBuffer(x);
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] += g[i];
  });
}

template <typename T>
Var UpsampleNearest2x(Tape<T>& tape, Var x) {
  const auto& xv = tape.value(x);
  Require(xv.rank() == 4, "UpsampleNearest2x: rank");
  const int N = xv.dim(0), C = xv.dim(1), H = xv.dim(2), W = xv.dim(3);
  Tensor<T> out({N, C, 2 * H, 2 * W});
  for (int p = 0; p < N * C; ++p) {
    const T* src = xv.data() + static_cast<std::size_t>(p) * H * W;
    T* dst = out.data() + static_cast<std::size_t>(p) * 4 * H * W;
    for (int yy = 0; yy < 2 * H; ++yy)
      for (int xx = 0; xx < 2 * W; ++xx)
        dst[yy * 2 * W + xx] = src[(yy / 2) * W + xx / 2];
  }
  return tape.Emit(std::move(out), {x}, [x, N, C, H, W](Tape<T>& t, const Tensor<T>& g) {
    auto& dx = t.GradBuffer(x);
    for (int p = 0; p < N * C; ++p) {
      const T* src = g.data() + static_cast<std::size_t>(p) * 4 * H * W;
      T* dst = dx.data() + static_cast<std::size_t>(p) * H * W;
      for (int yy = 0; yy < 2 * H; ++yy)
        for (int xx = 0; xx < 2 * W; ++xx) dst[(yy / 2) * W + xx / 2] += src[yy * 2 * W + xx];
    }
  });
}

template <typename T>
Var AvgPool2x(Tape<T>& tape, Var x) {
  const auto& xv = tape.value(x);
  Require(xv.rank() == 4 && xv.dim(2) % 2 == 0 && xv.dim(3) % 2 == 0,
          "AvgPool2x: needs even spatial size, got " + ShapeToString(xv.shape()));
  const int N = xv.dim(0), C = xv.dim(1), H = xv.dim(2) / 2, W = xv.dim(3) / 2;
  Tensor<T> out({N, C, H, W});
  for (int p = 0; p < N * C; ++p) {
    const T* src = xv.data() + static_cast<std::size_t>(p) * 4 * H * W;
    T* dst = out.data() + static_cast<std::size_t>(p) * H * W;
    for (int yy = 0; yy < H; ++yy)
      for (int xx = 0; xx < W; ++xx) {
        const T* s = src + 2 * yy * 2 * W + 2 * xx;
        dst[yy * W + xx] = T(0.25) * (s[0] + s[1] + s[2 * W] + s[2 * W + 1]);
      }
  }
  return tape.Emit(std::move(out), {x}, [x, N, C, H, W](Tape<T>& t, const Tensor<T>& g) {
    auto& dx = t.GradBuffer(x);
    for (int p = 0; p < N * C; ++p) {
      const T* src = g.data() + static_cast<std::size_t>(p) * H * W;
      T* dst = dx.data() + static_cast<std::size_t>(p) * 4 * H * W;
      for (int yy = 0; yy < H; ++yy)
        for (int xx = 0; xx < W; ++xx) {
          const T v = T(0.25) * src[yy * W + xx];
          T* d = dst + 2 * yy * 2 * W + 2 * xx;
          d[0] += v;
          d[1] += v;
          d[2 * W] += v;
          d[2 * W + 1] += v;
        }
    }
  });
}

template <typename T>
Var SumSpatial(Tape<T>& tape, Var x) {
  const auto& xv = tape.value(x);
  Require(xv.rank() == 4, "SumSpatial: rank");
  const int N = xv.dim(0), C = xv.dim(1), HW = xv.dim(2) * xv.dim(3);
  Tensor<T> out({N, C});
  for (int p = 0; p < N * C; ++p) {
    const T* src = xv.data() + static_cast<std::size_t>(p) * HW;
    T acc = 0;
    for (int k = 0; k < HW; ++k) acc += src[k];
    out[static_cast<std::size_t>(p)] = acc;
  }
  return tape.Emit(std::move(out), {x}, [x, N, C, HW](Tape<T>& t, const Tensor<T>& g) {
    auto& dx = t.GradBuffer(x);
    for (int p = 0; p < N * C; ++p) {
      T* dst = dx.data() + static_cast<std::size_t>(p) * HW;
      const T v = g[static_cast<std::size_t>(p)];
      for (int k = 0; k < HW; ++k) dst[k] += v;
    }
  });
}

template <typename T>
Var BatchNormTrain(Tape<T>& tape, Var x, T eps, Tensor<T>* batch_mean,
                   Tensor<T>* batch_var) {
  const auto& xv = tape.value(x);
  Require(xv.rank() == 4, "BatchNormTrain: rank");
  const int N = xv.dim(0), C = xv.dim(1), HW = xv.dim(2) * xv.dim(3);
  const double M = static_cast<double>(N) * HW;
  Tensor<T> out(xv.shape());
  std::vector<T> inv_std(static_cast<std::size_t>(C));
  Tensor<T> mean_t({C}), var_t({C});
  for (int c = 0; c < C; ++c) {
    double sum = 0, sq = 0;
    for (int n = 0; n < N; ++n) {
      const T* src = xv.data() + (static_cast<std::size_t>(n) * C + c) * HW;
      for (int k = 0; k < HW; ++k) sum += src[k];
    }
    const double mean = sum / M;
    for (int n = 0; n < N; ++n) {
      const T* src = xv.data() + (static_cast<std::size_t>(n) * C + c) * HW;
      for (int k = 0; k < HW; ++k) sq += (src[k] - mean) * (src[k] - mean);
    }
    const double var = sq / M;
    const double is = 1.0 / std::sqrt(var + static_cast<double>(eps));
    inv_std[static_cast<std::size_t>(c)] = static_cast<T>(is);
    mean_t[static_cast<std::size_t>(c)] = static_cast<T>(mean);
    var_t[static_cast<std::size_t>(c)] = static_cast<T>(var);
    for (int n = 0; n < N; ++n) {
      const std::size_t off = (static_cast<std::size_t>(n) * C + c) * HW;
      for (int k = 0; k < HW; ++k)
        out[off + k] = static_cast<T>((xv[off + k] - mean) * is);
    }
  }
  if (batch_mean) *batch_mean = mean_t;
  if (batch_var) *batch_var = var_t;
  const Var self = tape.NextVar();
  return tape.Emit(std::move(out), {x},
                   [x, self, N, C, HW, M, inv_std](Tape<T>& t, const Tensor<T>& g) {
                     const auto& xhat = t.value(self);
                     auto& dx = t.GradBuffer(x);
                     for (int c = 0; c < C; ++c) {
                       double sg = 0, sgx = 0;
                       for (int n = 0; n < N; ++n) {
                         const std::size_t off = (static_cast<std::size_t>(n) * C + c) * HW;
                         for (int k = 0; k < HW; ++k) {
                           sg += g[off + k];
                           sgx += g[off + k] * xhat[off + k];
                         }
                       }
                       const double mg = sg / M, mgx = sgx / M;
                       const double is = inv_std[static_cast<std::size_t>(c)];
                       for (int n = 0; n < N; ++n) {
                         const std::size_t off = (static_cast<std::size_t>(n) * C + c) * HW;
                         for (int k = 0; k < HW; ++k)
                           dx[off + k] += static_cast<T>(
                               is * (g[off + k] - mg - xhat[off + k] * mgx));
                       }
                     }
                   });
}

template <typename T>
Var BatchNormEval(Tape<T>& tape, Var x, const Tensor<T>& mean, const Tensor<T>& var,
                  T eps) {
  const auto& xv = tape.value(x);
  Require(xv.rank() == 4 && static_cast<int>(mean.size()) == xv.dim(1) &&
              static_cast<int>(var.size()) == xv.dim(1),
          "BatchNormEval: shape mismatch");
  const int N = xv.dim(0), C = xv.dim(1), HW = xv.dim(2) * xv.dim(3);
  std::vector<T> inv_std(static_cast<std::size_t>(C));
  for (int c = 0; c < C; ++c)
    inv_std[static_cast<std::size_t>(c)] =
        T(1) / std::sqrt(var[static_cast<std::size_t>(c)] + eps);
  Tensor<T> out(xv.shape());
  for (int n = 0; n < N; ++n)
    for (int c = 0; c < C; ++c) {
      const std::size_t off = (static_cast<std::size_t>(n) * C + c) * HW;
      const T m = mean[static_cast<std::size_t>(c)];
      const T is = inv_std[static_cast<std::size_t>(c)];
      for (int k = 0; k < HW; ++k) out[off + k] = (xv[off + k] - m) * is;
    }
  return tape.Emit(std::move(out), {x},
                   [x, N, C, HW, inv_std](Tape<T>& t, const Tensor<T>& g) {
                     auto& dx = t.GradBuffer(x);
                     for (int n = 0; n < N; ++n)
                       for (int c = 0; c < C; ++c) {
                         const std::size_t off = (static_cast<std::size_t>(n) * C + c) * HW;
                         const T is = inv_std[static_cast<std::size_t>(c)];
                         for (int k = 0; k < HW; ++k) dx[off + k] += g[off + k] * is;
                       }
                   });
}

template <typename T>
Var ClassAffine(Tape<T>& tape, Var x, Var gamma, Var beta,
                std::span<const int> classes) {
  const auto& xv = tape.value(x);
  const auto& gv = tape.value(gamma);
  const auto& bv = tape.value(beta);
  Require(xv.rank() >= 2 && gv.rank() == 2 && gv.shape() == bv.shape() &&
              gv.dim(1) == xv.dim(1),
          "ClassAffine: shape mismatch");
  const int N = xv.dim(0), C = xv.dim(1), K = gv.dim(0);
  const int HW = static_cast<int>(xv.size() / (static_cast<std::size_t>(N) * C));
  Require(static_cast<int>(classes.size()) == N, "ClassAffine: class count");
  for (int c : classes) {
    Require(c >= 0 && c < K, "ClassAffine: class index " + std::to_string(c) +
                                 " outside [0, " + std::to_string(K) + ")");
  }
  std::vector<int> cls(classes.begin(), classes.end());
  Tensor<T> out(xv.shape());
  for (int n = 0; n < N; ++n)
    for (int ch = 0; ch < C; ++ch) {
      const std::size_t off = (static_cast<std::size_t>(n) * C + ch) * HW;
      const std::size_t p = static_cast<std::size_t>(cls[n]) * C + ch;
      for (int k = 0; k < HW; ++k) out[off + k] = gv[p] * xv[off + k] + bv[p];
    }
  return tape.Emit(std::move(out), {x, gamma, beta},
                   [x, gamma, beta, N, C, HW, cls](Tape<T>& t, const Tensor<T>& g) {
                     const auto& xval = t.value(x);
                     const auto& gval = t.value(gamma);
                     const bool nx = t.requires_grad(x);
                     const bool ng = t.requires_grad(gamma);
                     const bool nb = t.requires_grad(beta);
                     for (int n = 0; n < N; ++n)
                       for (int ch = 0; ch < C; ++ch) {
                         const std::size_t off = (static_cast<std::size_t>(n) * C + ch) * HW;
                         const std::size_t p = static_cast<std::size_t>(cls[n]) * C + ch;
                         T sg = 0, sgx = 0;
                         for (int k = 0; k < HW; ++k) {
                           sg += g[off + k];
                           sgx += g[off + k] * xval[off + k];
                         }
                         if (ng) t.GradBuffer(gamma)[p] += sgx;
                         if (nb) t.GradBuffer(beta)[p] += sg;
                         if (nx) {
                           auto& dx = t.GradBuffer(x);
                           for (int k = 0; k < HW; ++k) dx[off + k] += gval[p] * g[off + k];
                         }
                       }
                   });
}

template <typename T>
Var Embedding(Tape<T>& tape, Var table, std::span<const int> classes) {
  const auto& tv = tape.value(table);
  Require(tv.rank() == 2, "Embedding: table rank");
  const int K = tv.dim(0), E = tv.dim(1);
  const int N = static_cast<int>(classes.size());
  std::vector<int> cls(classes.begin(), classes.end());
  Tensor<T> out({N, E});
  for (int n = 0; n < N; ++n) {
    Require(cls[n] >= 0 && cls[n] < K, "Embedding: class index out of range");
    std::copy_n(tv.data() + static_cast<std::size_t>(cls[n]) * E, E,
                out.data() + static_cast<std::size_t>(n) * E);
  }
  return tape.Emit(std::move(out), {table}, [table, E, cls](Tape<T>& t, const Tensor<T>& g) {
    auto& dt = t.GradBuffer(table);
    for (std::size_t n = 0; n < cls.size(); ++n)
      for (int e = 0; e < E; ++e)
        dt[static_cast<std::size_t>(cls[n]) * E + e] += g[n * E + e];
  });
}

template <typename T>
Var ConcatColumns(Tape<T>& tape, Var a, Var b) {
  const auto& av = tape.value(a);
  const auto& bv = tape.value(b);
  Require(av.rank() == 2 && bv.rank() == 2 && av.dim(0) == bv.dim(0),
          "ConcatColumns: shape mismatch");
  const int N = av.dim(0), A = av.dim(1), B = bv.dim(1);
  Tensor<T> out({N, A + B});
  for (int n = 0; n < N; ++n) {
    std::copy_n(av.data() + static_cast<std::size_t>(n) * A, A,
                out.data() + static_cast<std::size_t>(n) * (A + B));
    std::copy_n(bv.data() + static_cast<std::size_t>(n) * B, B,
                out.data() + static_cast<std::size_t>(n) * (A + B) + A);
  }
  return tape.Emit(std::move(out), {a, b}, [a, b, N, A, B](Tape<T>& t, const Tensor<T>& g) {
    for (int n = 0; n < N; ++n) {
      const T* row = g.data() + static_cast<std::size_t>(n) * (A + B);
      if (t.requires_grad(a)) {
        T* d = t.GradBuffer(a).data() + static_cast<std::size_t>(n) * A;
        for (int k = 0; k < A; ++k) d[k] += row[k];
      }
      if (t.requires_grad(b)) {
        T* d = t.GradBuffer(b).data() + static_cast<std::size_t>(n) * B;
        for (int k = 0; k < B; ++k) d[k] += row[A + k];
      }
    }
  });
}

template <typename T>
Var SliceRows(Tape<T>& tape, Var x, int begin, int end) {
  const auto& xv = tape.value(x);
  Require(xv.rank() >= 1 && 0 <= begin && begin <= end && end <= xv.dim(0),
          "SliceRows: bad range");
  const std::size_t row = xv.size() / static_cast<std::size_t>(std::max(1, xv.dim(0)));
  Shape shape = xv.shape();
  shape[0] = end - begin;
  Tensor<T> out(shape);
  std::copy_n(xv.data() + static_cast<std::size_t>(begin) * row, out.size(), out.data());
  return tape.Emit(std::move(out), {x}, [x, begin, row](Tape<T>& t, const Tensor<T>& g) {
    T* d = t.GradBuffer(x).data() + static_cast<std::size_t>(begin) * row;
    for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
  });
}

template <typename T>
Var SpectralNormWeight(Tape<T>& tape, Var w, const std::vector<T>& u,
                       const std::vector<T>& v, T* sigma_out) {
  const auto& wv = tape.value(w);
  const int rows = wv.dim(0);
  const int cols = static_cast<int>(wv.size() / static_cast<std::size_t>(rows));
  Require(static_cast<int>(u.size()) == rows && static_cast<int>(v.size()) == cols,
          "SpectralNormWeight: power vectors do not match weight");
  ConstMapMat<T> wm(wv.data(), rows, cols);
  Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>> um(u.data(), rows);
  Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>> vm(v.data(), cols);
  T sigma = um.dot(wm * vm);
  sigma = std::max(sigma, T(1e-12));
  if (sigma_out) *sigma_out = sigma;
  Tensor<T> out = wv;
  for (auto& e : out.values()) e /= sigma;
  return tape.Emit(std::move(out), {w},
                   [w, u, v, sigma, rows, cols](Tape<T>& t, const Tensor<T>& g) {
                     const auto& wval = t.value(w);
                     T inner = 0;
                     for (std::size_t i = 0; i < g.size(); ++i) inner += g[i] * wval[i];
                     const T coef = inner / (sigma * sigma);
                     auto& dw = t.GradBuffer(w);
                     for (int r = 0; r < rows; ++r)
                       for (int c = 0; c < cols; ++c) {
                         const std::size_t i = static_cast<std::size_t>(r) * cols + c;
                         dw[i] += g[i] / sigma - coef * u[static_cast<std::size_t>(r)] *
                                                     v[static_cast<std::size_t>(c)];
                       }
                   });
}

template <typename T>
Var Projection(Tape<T>& tape, Var phi, Var y, Var v_y, Var v_x) {
  const auto& pv = tape.value(phi);
  const auto& yv = tape.value(y);
  const auto& vyv = tape.value(v_y);
  const auto& vxv = tape.value(v_x);
  Require(pv.rank() == 2, "Projection: phi must be [N, F]");
  const int N = pv.dim(0), F = pv.dim(1);
  Require(static_cast<int>(yv.size()) == N && static_cast<int>(vyv.size()) == F &&
              static_cast<int>(vxv.size()) == F,
          "Projection: dimension mismatch (phi " + ShapeToString(pv.shape()) +
              ", y " + ShapeToString(yv.shape()) + ", v_y " +
              ShapeToString(vyv.shape()) + ", v_x " + ShapeToString(vxv.shape()) + ")");
  Tensor<T> out({N});
  for (int n = 0; n < N; ++n) {
    T dy = 0, dx = 0;
    for (int f = 0; f < F; ++f) {
      const T p = pv[static_cast<std::size_t>(n) * F + f];
      dy += vyv[static_cast<std::size_t>(f)] * p;
      dx += vxv[static_cast<std::size_t>(f)] * p;
    }
    out[static_cast<std::size_t>(n)] = yv[static_cast<std::size_t>(n)] * dy + dx;
  }
  return tape.Emit(std::move(out), {phi, y, v_y, v_x},
                   [phi, y, v_y, v_x, N, F](Tape<T>& t, const Tensor<T>& g) {
                     const auto& p = t.value(phi);
                     const auto& yy = t.value(y);
                     const auto& vy = t.value(v_y);
                     const auto& vx = t.value(v_x);
                     for (int n = 0; n < N; ++n) {
                       const T gn = g[static_cast<std::size_t>(n)];
                       const T yn = yy[static_cast<std::size_t>(n)];
                       const T* pn = p.data() + static_cast<std::size_t>(n) * F;
                       if (t.requires_grad(phi)) {
                         T* d = t.GradBuffer(phi).data() + static_cast<std::size_t>(n) * F;
                         for (int f = 0; f < F; ++f)
                           d[f] += gn * (yn * vy[static_cast<std::size_t>(f)] +
                                         vx[static_cast<std::size_t>(f)]);
                       }
                       if (t.requires_grad(y)) {
                         T dot = 0;
                         for (int f = 0; f < F; ++f) dot += vy[static_cast<std::size_t>(f)] * pn[f];
                         t.GradBuffer(y)[static_cast<std::size_t>(n)] += gn * dot;
                       }
                       if (t.requires_grad(v_y)) {
                         auto& d = t.GradBuffer(v_y);
                         for (int f = 0; f < F; ++f) d[static_cast<std::size_t>(f)] += gn * yn * pn[f];
                       }
                       if (t.requires_grad(v_x)) {
                         auto& d = t.GradBuffer(v_x);
                         for (int f = 0; f < F; ++f) d[static_cast<std::size_t>(f)] += gn * pn[f];
                       }
                     }
                   });
}

template <typename T>
Var HingeDiscriminator(Tape<T>& tape, Var real, Var fake) {
  T loss = 0;
  auto side = [&](Var v, T sign) {
    if (!v.valid()) return;
    const auto& vv = tape.value(v);
    if (vv.empty()) return;
    T acc = 0;
    for (T s : vv.values()) {
      if (!std::isfinite(s)) throw std::invalid_argument("hinge: non-finite logit");
      acc += std::max(T(0), T(1) - sign * s);
    }
    loss += acc / static_cast<T>(vv.size());
  };
  side(real, T(1));
  side(fake, T(-1));
  return tape.Emit(Tensor<T>({1}, {loss}), {real, fake},
                   [real, fake](Tape<T>& t, const Tensor<T>& g) {
                     auto back = [&](Var v, T sign) {
                       if (!v.valid() || !t.requires_grad(v)) return;
                       const auto& vv = t.value(v);
                       if (vv.empty()) return;
                       auto& d = t.GradBuffer(v);
                       const T scale = g[0] / static_cast<T>(vv.size());
                       for (std::size_t i = 0; i < vv.size(); ++i)
                         if (T(1) - sign * vv[i] > T(0)) d[i] -= sign * scale;
                     };
                     back(real, T(1));
                     back(fake, T(-1));
                   });
}

template <typename T>
Var HingeGenerator(Tape<T>& tape, Var fake) {
  const auto& fv = tape.value(fake);
  Require(!fv.empty(), "HingeGenerator: empty batch");
  T acc = 0;
  for (T s : fv.values()) {
    if (!std::isfinite(s)) throw std::invalid_argument("hinge: non-finite logit");
    acc += s;
  }
  const T n = static_cast<T>(fv.size());
  return tape.Emit(Tensor<T>({1}, {-acc / n}), {fake}, [fake, n](Tape<T>& t, const Tensor<T>& g) {
    auto& d = t.GradBuffer(fake);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] -= g[0] / n;
  });
}

template <typename T>
Var SoftmaxCrossEntropy(Tape<T>& tape, Var logits, std::span<const int> labels,
                        std::span<const T> weights, bool uniform_target) {
  const auto& lv = tape.value(logits);
  Require(lv.rank() == 2, "SoftmaxCrossEntropy: logits must be [N, K]");
  const int N = lv.dim(0), K = lv.dim(1);
  Require(uniform_target ? (labels.empty() || static_cast<int>(labels.size()) == N)
                         : static_cast<int>(labels.size()) == N,
          "SoftmaxCrossEntropy: label count");
  Require(weights.empty() || static_cast<int>(weights.size()) == N,
          "SoftmaxCrossEntropy: weight count");
  if (!uniform_target) {
    for (int l : labels) {
      Require(l >= 0 && l < K, "SoftmaxCrossEntropy: label " + std::to_string(l) +
                                   " outside [0, " + std::to_string(K) + ")");
    }
  }
  Tensor<T> probs({N, K});
  T total = 0;
  for (int n = 0; n < N; ++n) {
    const T* row = lv.data() + static_cast<std::size_t>(n) * K;
    T mx = -std::numeric_limits<T>::infinity();
    for (int k = 0; k < K; ++k) mx = std::max(mx, row[k]);
    T z = 0;
    for (int k = 0; k < K; ++k) z += std::exp(row[k] - mx);
    const T log_z = mx + std::log(z);
    T ce = 0;
    if (uniform_target) {
      for (int k = 0; k < K; ++k) ce += (log_z - row[k]) / static_cast<T>(K);
    } else {
      ce = log_z - row[labels[static_cast<std::size_t>(n)]];
    }
    for (int k = 0; k < K; ++k)
      probs[static_cast<std::size_t>(n) * K + k] = std::exp(row[k] - log_z);
    const T w = weights.empty() ? T(1) : weights[static_cast<std::size_t>(n)];
    total += w * ce;
  }
  const T loss = N > 0 ? total / static_cast<T>(N) : T(0);
  std::vector<int> lab(labels.begin(), labels.end());
  std::vector<T> wts(weights.begin(), weights.end());
  return tape.Emit(Tensor<T>({1}, {loss}), {logits},
                   [logits, N, K, probs = std::move(probs), lab, wts,
                    uniform_target](Tape<T>& t, const Tensor<T>& g) {
                     auto& d = t.GradBuffer(logits);
                     for (int n = 0; n < N; ++n) {
                       const T w = wts.empty() ? T(1) : wts[static_cast<std::size_t>(n)];
                       const T scale = g[0] * w / static_cast<T>(N);
                       for (int k = 0; k < K; ++k) {
                         const std::size_t i = static_cast<std::size_t>(n) * K + k;
                         T target = uniform_target ? T(1) / static_cast<T>(K)
                                                   : (lab[static_cast<std::size_t>(n)] == k ? T(1) : T(0));
                         d[i] += scale * (probs[i] - target);
                       }
                     }
                   });
}

template <typename T>
Var ConcatRows(Tape<T>& tape, std::span<const Var> parts) {
  std::vector<Var> used;
  Shape shape;
  int rows = 0;
  for (Var v : parts) {
    if (!v.valid() || tape.value(v).empty()) continue;
    const auto& s = tape.value(v).shape();
    if (used.empty()) {
      shape = s;
    } else {
      Require(s.size() == shape.size() && std::equal(s.begin() + 1, s.end(), shape.begin() + 1),
              "ConcatRows: trailing shape mismatch");
    }
    rows += s[0];
    used.push_back(v);
  }
  Require(!used.empty(), "ConcatRows: nothing to concatenate");
  shape[0] = rows;
  Tensor<T> out(shape);
  std::size_t off = 0;
  std::vector<std::size_t> offsets;
  for (Var v : used) {
    offsets.push_back(off);
    const auto& vv = tape.value(v);
    std::copy_n(vv.data(), vv.size(), out.data() + off);
    off += vv.size();
  }
  return tape.Emit(std::move(out), std::span<const Var>(used),
                   [used, offsets](Tape<T>& t, const Tensor<T>& g) {
                     for (std::size_t k = 0; k < used.size(); ++k) {
                       if (!t.requires_grad(used[k])) continue;
                       auto& d = t.GradBuffer(used[k]);
                       for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[offsets[k] + i];
                     }
                   });
}

template <typename T>
Var WeightedCrossEntropy(Tape<T>& tape, Var logits, std::span<const int> labels,
                         Var weights, bool uniform_target) {
  const auto& wv = tape.value(weights);
  const auto& lv = tape.value(logits);
  Require(lv.rank() == 2 && static_cast<int>(wv.size()) == lv.dim(0),
          "WeightedCrossEntropy: weight count");
  const int N = lv.dim(0);
  std::vector<T> ce(static_cast<std::size_t>(N));
  const int K = lv.dim(1);
  for (int n = 0; n < N; ++n) {
    const T* row = lv.data() + static_cast<std::size_t>(n) * K;
    const T mx = *std::max_element(row, row + K);
    T z = 0;
    for (int k = 0; k < K; ++k) z += std::exp(row[k] - mx);
    const T log_z = mx + std::log(z);
    T v = 0;
    if (uniform_target) {
      for (int k = 0; k < K; ++k) v += (log_z - row[k]) / static_cast<T>(K);
    } else {
      const int l = labels[static_cast<std::size_t>(n)];
      Require(l >= 0 && l < K, "WeightedCrossEntropy: label out of range");
      v = log_z - row[l];
    }
    ce[static_cast<std::size_t>(n)] = v;
  }
  Tensor<T> w_copy = wv;
  const Var inner = SoftmaxCrossEntropy(tape, logits, labels, std::span<const T>(w_copy.storage()),
                                        uniform_target);
  T loss = tape.value(inner)[0];
  return tape.Emit(Tensor<T>({1}, {loss}), {inner, weights},
                   [inner, weights, ce, N](Tape<T>& t, const Tensor<T>& g) {
                     if (t.requires_grad(inner)) t.GradBuffer(inner)[0] += g[0];
                     if (t.requires_grad(weights)) {
                       auto& d = t.GradBuffer(weights);
                       for (int n = 0; n < N; ++n)
                         d[static_cast<std::size_t>(n)] += g[0] * ce[static_cast<std::size_t>(n)] / T(N);
                     }
                   });
}

template <typename T>
Var GateWeight(Tape<T>& tape, Var y, T magnitude) {
  Require(magnitude > T(0), "GateWeight: magnitude must be positive");
  Tensor<T> out = tape.value(y);
  for (auto& v : out.values()) v = std::clamp((v / magnitude + T(1)) / T(2), T(0), T(1));
  return tape.Emit(std::move(out), {y}, [y, magnitude](Tape<T>& t, const Tensor<T>& g) {
    const auto& yv = t.value(y);
    auto& d = t.GradBuffer(y);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const T raw = (yv[i] / magnitude + T(1)) / T(2);
      if (raw > T(0) && raw < T(1)) d[i] += g[i] / (T(2) * magnitude);
    }
  });
}

template <typename T>
Var AddScalars(Tape<T>& tape, std::span<const Var> terms) {
  T total = 0;
  for (Var v : terms) {
    Require(tape.value(v).size() == 1, "AddScalars: non-scalar term");
    total += tape.value(v)[0];
  }
  std::vector<Var> ts(terms.begin(), terms.end());
  return tape.Emit(Tensor<T>({1}, {total}), terms, [ts](Tape<T>& t, const Tensor<T>& g) {
    for (Var v : ts)
      if (t.requires_grad(v)) t.GradBuffer(v)[0] += g[0];
  });
}

#define FAIRGAN_INSTANTIATE_OPS(T)                                                  \
  template Var Linear<T>(Tape<T>&, Var, Var, Var);                                  \
  template Var Conv2d<T>(Tape<T>&, Var, Var, Var);                                  \
  template Var Relu<T>(Tape<T>&, Var);                                              \
  template Var Tanh<T>(Tape<T>&, Var);                                              \
  template Var Add<T>(Tape<T>&, Var, Var);                                          \
  template Var Scale<T>(Tape<T>&, Var, T);                                          \
  template Var Reshape<T>(Tape<T>&, Var, Shape);                                    \
  template Var UpsampleNearest2x<T>(Tape<T>&, Var);                                 \
  template Var AvgPool2x<T>(Tape<T>&, Var);                                         \
  template Var SumSpatial<T>(Tape<T>&, Var);                                        \
  template Var BatchNormTrain<T>(Tape<T>&, Var, T, Tensor<T>*, Tensor<T>*);         \
  template Var BatchNormEval<T>(Tape<T>&, Var, const Tensor<T>&, const Tensor<T>&, \
                                T);                                                 \
  template Var ClassAffine<T>(Tape<T>&, Var, Var, Var, std::span<const int>);       \
  template Var Embedding<T>(Tape<T>&, Var, std::span<const int>);                   \
  template Var ConcatColumns<T>(Tape<T>&, Var, Var);                                \
  template Var SliceRows<T>(Tape<T>&, Var, int, int);                               \
  template Var SpectralNormWeight<T>(Tape<T>&, Var, const std::vector<T>&,          \
                                     const std::vector<T>&, T*);                    \
  template Var Projection<T>(Tape<T>&, Var, Var, Var, Var);                         \
  template Var HingeDiscriminator<T>(Tape<T>&, Var, Var);                           \
  template Var HingeGenerator<T>(Tape<T>&, Var);                                    \
  template Var SoftmaxCrossEntropy<T>(Tape<T>&, Var, std::span<const int>,          \
                                      std::span<const T>, bool);                    \
  template Var AddScalars<T>(Tape<T>&, std::span<const Var>);                       \
  template Var ConcatRows<T>(Tape<T>&, std::span<const Var>);                       \
  template Var WeightedCrossEntropy<T>(Tape<T>&, Var, std::span<const int>, Var,    \
                                       bool);                                       \
  template Var GateWeight<T>(Tape<T>&, Var, T);

FAIRGAN_INSTANTIATE_OPS(float)
FAIRGAN_INSTANTIATE_OPS(double)

}  // namespace fairgan::nn
