// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_EVALUATION_METRICS_H_
#define FAIRGAN_EVALUATION_METRICS_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fairgan/core/dataset.h"

namespace fairgan::evaluation {

class OutcomeClassifier;

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  std::int64_t total() const { return tp + fp + tn + fn; }
  std::int64_t positives() const { return tp + fn; }
  std::int64_t negatives() const { return tn + fp; }
  bool operator==(const ConfusionCounts&) const = default;
};

// Indexed by the protected attribute c.
using GroupConfusion = std::array<ConfusionCounts, 2>;

// Predictions are [score > threshold].
GroupConfusion ConfusionFromScores(std::span<const double> scores, std::span<const int> c,
                                   std::span<const int> y, double threshold = 0.5);
GroupConfusion ComputeGroupConfusion(OutcomeClassifier& classifier,
                                     const AttributedDataset& test_data,
                                     double threshold = 0.5);

// Absent when the denominator is empty.
struct GroupRates {
  std::optional<double> fpr;
  std::optional<double> fnr;
  std::optional<double> err;
  bool operator==(const GroupRates&) const = default;
};

// dp = |err_0 - err_1|, eo = |fnr_0 - fnr_1|. Either is absent when one of
// its rates is.
struct GroupMetricsReport {
  std::array<GroupRates, 2> groups;
  std::optional<double> unconditional_err;
  std::optional<double> dp;
  std::optional<double> eo;
  std::optional<GroupConfusion> counts;

  // Throw NumericError naming the missing rate.
  double Dp() const;
  double Eo() const;
  bool operator==(const GroupMetricsReport&) const = default;
};

GroupMetricsReport FairnessMetrics(const GroupConfusion& counts);
// Metric arithmetic on rates alone, e.g. rates read off a published table.
GroupMetricsReport MetricsFromRates(const std::array<GroupRates, 2>& groups,
                                    std::optional<double> unconditional_err = std::nullopt);

// Mean over classifier seeds in both aggregations: `of_mean` averages the
// rates and recomputes dp/eo from them; `mean_abs_dp`/`mean_abs_eo` average
// the per-seed gaps. A rate absent in any seed is absent in the mean.
struct AggregateReport {
  GroupMetricsReport of_mean;
  std::optional<double> mean_abs_dp;
  std::optional<double> mean_abs_eo;
  std::size_t n = 0;
};

AggregateReport Aggregate(std::span<const GroupMetricsReport> reports);

struct RocPoint {
  double fpr = 0;
  double tpr = 0;
  bool operator==(const RocPoint&) const = default;
  auto operator<=>(const RocPoint&) const = default;
};

struct RocCurve {
  int group = 0;
  std::vector<RocPoint> points;  // sorted by (fpr, tpr), (0,0) ... (1,1)
  RocPoint operating_point;
  double operating_threshold = 0.5;
};

// Sweeps every distinct score as a threshold plus the extremes and the
// operating threshold. Throws DataError when the group is empty or lacks one
// of the outcomes.
RocCurve RocFromScores(std::span<const double> scores, std::span<const int> c,
                       std::span<const int> y, int group, double operating_threshold = 0.5);
RocCurve ComputeRoc(OutcomeClassifier& classifier, const AttributedDataset& test_data,
                    int group, double operating_threshold = 0.5);

}  // namespace fairgan::evaluation

#endif  // FAIRGAN_EVALUATION_METRICS_H_
