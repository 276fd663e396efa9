// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include "fairgan/core/split.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include <spdlog/spdlog.h>

namespace fairgan {
namespace {

// Stratification key; -1 marks an ignored coordinate.
using CellKey = std::pair<int, int>;

}  // namespace

SplitResult SplitDataset(const AttributedDataset& dataset,
                         const SplitConfig& config) {
  if (dataset.empty()) throw std::invalid_argument("cannot split an empty dataset");
  if (!dataset.outcome_labeled) {
    throw std::invalid_argument("split requires an outcome-labeled dataset");
  }
  if (!(config.test_fraction > 0.0 && config.test_fraction < 1.0)) {
    throw std::invalid_argument("test_fraction must lie in (0, 1)");
  }

  SplitResult result;
  std::map<CellKey, std::vector<std::size_t>> cells;
  if (config.stratify_on_c || config.stratify_on_y) {
    // Enumerate the full binary grid so that empty cells are reported.
    for (int c : {0, 1}) {
      for (int y : {0, 1}) {
        cells[{config.stratify_on_c ? c : -1, config.stratify_on_y ? y : -1}];
      }
    }
  }
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& s = dataset.samples[i];
    cells[{config.stratify_on_c ? s.c : -1,
           config.stratify_on_y ? s.y_hard.value_or(-1) : -1}]
        .push_back(i);
  }

  const std::size_t n = dataset.size();
  const auto total_test =
      static_cast<std::size_t>(std::llround(config.test_fraction * n));

  // Largest-remainder apportionment of total_test over the cells.
  struct Quota {
    std::vector<std::size_t>* members;
    std::size_t take;
    double remainder;
    std::size_t order;
  };
  std::vector<Quota> quotas;
  std::size_t assigned = 0;
  std::size_t order = 0;
  for (auto& [key, members] : cells) {
    if (members.empty()) {
      std::string msg = "stratification cell (c=" + std::to_string(key.first) +
                        ", y=" + std::to_string(key.second) +
                        ") has no samples; skipped";
      spdlog::warn("{}", msg);
      result.warnings.push_back(std::move(msg));
      continue;
    }
    const double exact = config.test_fraction * members.size();
    const auto take = static_cast<std::size_t>(std::floor(exact));
    quotas.push_back({&members, take, exact - take, order++});
    assigned += take;
  }
  std::vector<std::size_t> by_remainder(quotas.size());
  std::iota(by_remainder.begin(), by_remainder.end(), 0);
  std::stable_sort(by_remainder.begin(), by_remainder.end(),
                   [&](std::size_t a, std::size_t b) {
                     return quotas[a].remainder > quotas[b].remainder;
                   });
  for (std::size_t k = 0; assigned < total_test && k < by_remainder.size(); ++k) {
    auto& q = quotas[by_remainder[k]];
    if (q.take < q.members->size()) {
      ++q.take;
      ++assigned;
    }
  }

  std::mt19937_64 rng(config.seed);
  std::vector<bool> is_test(n, false);
  for (auto& q : quotas) {
    std::vector<std::size_t> members = *q.members;
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t k = 0; k < q.take; ++k) is_test[members[k]] = true;
  }
  for (std::size_t i = 0; i < n; ++i) {
    (is_test[i] ? result.test_indices : result.train_indices).push_back(i);
  }
  result.train = Subset(dataset, result.train_indices);
  result.test = Subset(dataset, result.test_indices);
  return result;
}

}  // namespace fairgan
