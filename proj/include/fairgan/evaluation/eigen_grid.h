// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_EVALUATION_EIGEN_GRID_H_
#define FAIRGAN_EVALUATION_EIGEN_GRID_H_

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <vector>

#include "fairgan/core/dataset.h"

namespace fairgan::evaluation {

// Mean and leading principal directions of row-stacked samples. Columns of
// `components` are unit vectors ordered by decreasing variance, each signed so
// its largest-magnitude coordinate (first one on ties) is positive.
// `stddevs` are the standard deviations of the projections (n - 1 divisor).
struct PrincipalComponents {
  Eigen::VectorXd mean;
  Eigen::MatrixXd components;
  Eigen::VectorXd stddevs;
};

// Needs at least 2 rows and k <= min(rows, cols).
PrincipalComponents TopPrincipalComponents(const Eigen::MatrixXd& samples, int k);

// 3x3 grid: cell (row, col) shows clamp(mean + i s1 v1 + j s2 v2, -1, 1) with
// i = col - 1 along the first component (horizontal) and j = row - 1 along
// the second (vertical), so the center is the mean and the corners combine
// both components.
struct EigenGrid {
  ImageShape shape;
  std::size_t count = 0;
  std::vector<float> mean;
  std::vector<double> v1, v2;
  double s1 = 0, s2 = 0;
  std::array<std::vector<float>, 9> cells;  // row-major
  bool degenerate = false;                   // zero variance: every cell is the mean

  const std::vector<float>& cell(int row, int col) const { return cells[row * 3 + col]; }
  // CHW tiling of the nine cells with 1-pixel separators at value +1.
  ImageShape CompositeShape() const;
  std::vector<float> Composite() const;
};

// Throws std::invalid_argument for fewer than 3 images or mismatched sizes.
EigenGrid ComputeEigenGrid(const std::vector<std::vector<float>>& images,
                           const ImageShape& shape);

// Grid over the samples with c == group and y_hard == outcome; absent when
// fewer than 3 such samples exist.
std::optional<EigenGrid> EigenGridForCell(const AttributedDataset& data, int group,
                                          int outcome);

}  // namespace fairgan::evaluation

#endif  // FAIRGAN_EVALUATION_EIGEN_GRID_H_
