// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_EVALUATION_PIPELINE_H_
#define FAIRGAN_EVALUATION_PIPELINE_H_

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fairgan/core/dataset.h"
#include "fairgan/evaluation/classifier.h"
#include "fairgan/evaluation/eigen_grid.h"
#include "fairgan/evaluation/metrics.h"

namespace fairgan::evaluation {

struct NamedDataset {
  std::string name;
  const AttributedDataset* data = nullptr;
};

struct PipelineConfig {
  ClassifierConfig classifier;
  // "Average across iterations of the classifier": one classifier per seed.
  std::vector<std::uint64_t> seeds = {0, 1, 2};
  double threshold = 0.5;
  bool eigen_grids = true;
};

struct DatasetEvaluation {
  std::string name;
  std::string train_digest;
  std::vector<std::uint64_t> seeds;
  std::vector<GroupMetricsReport> per_seed;
  AggregateReport mean;
  // Per group, from the first seed's classifier. A curve has no points when
  // its test group is empty or single-outcome.
  std::array<RocCurve, 2> roc;
  // [group][outcome] over this dataset's training images.
  std::array<std::array<std::optional<EigenGrid>, 2>, 2> grids;
};

struct PipelineResult {
  std::string test_digest;
  std::size_t test_size = 0;
  std::vector<DatasetEvaluation> datasets;
};

inline constexpr const char* kOriginalName = "without_debiasing";

// Trains one classifier per (dataset, seed) on {original_train, debiased...},
// scores each on original_test, and assembles reports. The test set is only
// read; its digest is checked before and after. Progress lines go to
// `on_progress` when given.
PipelineResult EvaluatePipeline(const AttributedDataset& original_train,
                                const AttributedDataset& original_test,
                                const std::vector<NamedDataset>& debiased,
                                const PipelineConfig& config,
                                const nn::Discriminator<float>* probe_features = nullptr,
                                const std::function<void(const std::string&)>& on_progress = {});

}  // namespace fairgan::evaluation

#endif  // FAIRGAN_EVALUATION_PIPELINE_H_
