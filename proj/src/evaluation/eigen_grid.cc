// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include "fairgan/evaluation/eigen_grid.h"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fairgan::evaluation {

PrincipalComponents TopPrincipalComponents(const Eigen::MatrixXd& samples, int k) {
  const auto n = samples.rows();
  const auto d = samples.cols();
  if (n < 2) throw std::invalid_argument("PCA needs at least 2 samples");
  if (k < 1 || k > std::min(n, d)) throw std::invalid_argument("PCA: invalid component count");
  PrincipalComponents pc;
  pc.mean = samples.colwise().mean().transpose();
  const Eigen::MatrixXd centered = samples.rowwise() - pc.mean.transpose();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  pc.components = svd.matrixV().leftCols(k);
  pc.stddevs = svd.singularValues().head(k) / std::sqrt(static_cast<double>(n - 1));
  for (int j = 0; j < k; ++j) {
    Eigen::Index arg = 0;
    pc.components.col(j).cwiseAbs().maxCoeff(&arg);
    if (pc.components(arg, j) < 0) pc.components.col(j) *= -1;
  }
  return pc;
}

ImageShape EigenGrid::CompositeShape() const {
  return {shape.channels, 3 * shape.height + 2, 3 * shape.width + 2};
}

std::vector<float> EigenGrid::Composite() const {
  const auto out_shape = CompositeShape();
  std::vector<float> out(out_shape.size(), 1.0f);
  const int h = shape.height, w = shape.width;
  for (int row = 0; row < 3; ++row)
    for (int col = 0; col < 3; ++col) {
      const auto& img = cell(row, col);
      for (int c = 0; c < shape.channels; ++c)
        for (int r = 0; r < h; ++r)
          for (int q = 0; q < w; ++q) {
            const std::size_t dst = (static_cast<std::size_t>(c) * out_shape.height +
                                     row * (h + 1) + r) * out_shape.width + col * (w + 1) + q;
            out[dst] = img[(static_cast<std::size_t>(c) * h + r) * w + q];
          }
    }
  return out;
}

EigenGrid ComputeEigenGrid(const std::vector<std::vector<float>>& images,
                           const ImageShape& shape) {
  if (images.size() < 3) throw std::invalid_argument("eigen grid needs at least 3 images");
  const auto d = static_cast<Eigen::Index>(shape.size());
  if (d < 2) throw std::invalid_argument("eigen grid needs images with >= 2 pixels");
  Eigen::MatrixXd x(static_cast<Eigen::Index>(images.size()), d);
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (images[i].size() != shape.size()) {
      throw std::invalid_argument("eigen grid: image size does not match shape");
    }
    for (Eigen::Index p = 0; p < d; ++p) x(static_cast<Eigen::Index>(i), p) = images[i][p];
  }
  const auto pc = TopPrincipalComponents(x, 2);
  EigenGrid g;
  g.shape = shape;
  g.count = images.size();
  g.mean.assign(pc.mean.data(), pc.mean.data() + d);
  g.v1.assign(pc.components.col(0).data(), pc.components.col(0).data() + d);
  g.v2.assign(pc.components.col(1).data(), pc.components.col(1).data() + d);
  g.s1 = pc.stddevs(0);
  g.s2 = pc.stddevs(1);
  // Relative to the pixel scale, anything below this is rounding noise.
  g.degenerate = !(g.s1 > 1e-9);
  if (g.degenerate) g.s1 = g.s2 = 0;
  for (int row = 0; row < 3; ++row)
    for (int col = 0; col < 3; ++col) {
      const double i = col - 1, j = row - 1;
      auto& cell = g.cells[row * 3 + col];
      cell.resize(static_cast<std::size_t>(d));
      for (Eigen::Index p = 0; p < d; ++p) {
        const double v = pc.mean(p) + i * g.s1 * g.v1[p] + j * g.s2 * g.v2[p];
        cell[p] = static_cast<float>(std::clamp(v, -1.0, 1.0));
      }
    }
  return g;
}

std::optional<EigenGrid> EigenGridForCell(const AttributedDataset& data, int group,
                                          int outcome) {
  std::vector<std::vector<float>> images;
  for (const auto& s : data.samples) {
    if (s.c == group && s.y_hard && *s.y_hard == outcome) images.push_back(s.x);
  }
  if (images.size() < 3) return std::nullopt;
  return ComputeEigenGrid(images, data.image_shape);
}

}  // namespace fairgan::evaluation
