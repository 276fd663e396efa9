// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_CORE_SPLIT_H_
#define FAIRGAN_CORE_SPLIT_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fairgan/core/dataset.h"

namespace fairgan {

struct SplitConfig {
  double test_fraction = 0.1;
  std::uint64_t seed = 0;
  bool stratify_on_c = true;
  bool stratify_on_y = true;
};

struct SplitResult {
  AttributedDataset train;
  AttributedDataset test;
  // Indices into the input dataset, ascending.
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
  // One entry per empty stratification cell.
  std::vector<std::string> warnings;
};

// Seeded train/test partition. The total test count is
// round(test_fraction * n); per-cell quotas are apportioned by largest
// remainder, so every (c, y) cell keeps its proportion to within one sample.
// Both halves preserve the input order.
SplitResult SplitDataset(const AttributedDataset& dataset,
                         const SplitConfig& config);

}  // namespace fairgan

#endif  // FAIRGAN_CORE_SPLIT_H_
