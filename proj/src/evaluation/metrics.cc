// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include "fairgan/evaluation/metrics.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "fairgan/core/errors.h"
#include "fairgan/evaluation/classifier.h"

namespace fairgan::evaluation {
namespace {

std::optional<double> Ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

std::optional<double> Gap(const std::optional<double>& a, const std::optional<double>& b) {
  if (!a || !b) return std::nullopt;
  return std::abs(*a - *b);
}

void CheckLengths(std::size_t scores, std::size_t c, std::size_t y) {
  if (scores != c || scores != y) {
    throw std::invalid_argument("scores, attributes and outcomes differ in length");
  }
}

std::vector<int> Column(const AttributedDataset& data, bool outcome) {
  if (outcome && !data.outcome_labeled) throw DataError("test data carries no outcome labels");
  std::vector<int> out;
  out.reserve(data.size());
  for (const auto& s : data.samples) out.push_back(outcome ? s.y_hard.value() : s.c);
  return out;
}

std::optional<double> MeanOf(std::span<const GroupMetricsReport> reports,
                             std::optional<double> (*get)(const GroupMetricsReport&)) {
  double sum = 0;
  for (const auto& r : reports) {
    const auto v = get(r);
    if (!v) return std::nullopt;
    sum += *v;
  }
  return sum / static_cast<double>(reports.size());
}

}  // namespace

GroupConfusion ConfusionFromScores(std::span<const double> scores, std::span<const int> c,
                                   std::span<const int> y, double threshold) {
  CheckLengths(scores.size(), c.size(), y.size());
  GroupConfusion out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (c[i] != 0 && c[i] != 1) throw DataError("protected attribute outside {0, 1}");
    if (y[i] != 0 && y[i] != 1) throw DataError("outcome outside {0, 1}");
    auto& g = out[c[i]];
    const bool pred = scores[i] > threshold;
    if (y[i] == 1) {
      (pred ? g.tp : g.fn)++;
    } else {
      (pred ? g.fp : g.tn)++;
    }
  }
  return out;
}

GroupConfusion ComputeGroupConfusion(OutcomeClassifier& classifier,
                                     const AttributedDataset& test_data, double threshold) {
  const auto y = Column(test_data, true);
  const auto c = Column(test_data, false);
  return ConfusionFromScores(classifier.Score(test_data), c, y, threshold);
}

double GroupMetricsReport::Dp() const {
  if (!dp) throw NumericError("demographic parity undefined: a group error rate is absent");
  return *dp;
}

double GroupMetricsReport::Eo() const {
  if (!eo) {
    throw NumericError(
        "equality of opportunity undefined: a group false negative rate is absent");
  }
  return *eo;
}

GroupMetricsReport MetricsFromRates(const std::array<GroupRates, 2>& groups,
                                    std::optional<double> unconditional_err) {
  GroupMetricsReport r;
  r.groups = groups;
  r.unconditional_err = unconditional_err;
  r.dp = Gap(groups[0].err, groups[1].err);
  r.eo = Gap(groups[0].fnr, groups[1].fnr);
  return r;
}

GroupMetricsReport FairnessMetrics(const GroupConfusion& counts) {
  std::array<GroupRates, 2> rates;
  ConfusionCounts pooled;
  for (int g = 0; g < 2; ++g) {
    const auto& k = counts[g];
    rates[g] = {Ratio(k.fp, k.negatives()), Ratio(k.fn, k.positives()),
                Ratio(k.fp + k.fn, k.total())};
    pooled.tp += k.tp;
    pooled.fp += k.fp;
    pooled.tn += k.tn;
    pooled.fn += k.fn;
  }
  auto r = MetricsFromRates(rates, Ratio(pooled.fp + pooled.fn, pooled.total()));
  r.counts = counts;
  return r;
}

AggregateReport Aggregate(std::span<const GroupMetricsReport> reports) {
  if (reports.empty()) throw std::invalid_argument("aggregate: no reports");
  AggregateReport out;
  out.n = reports.size();
  std::array<GroupRates, 2> rates;
  for (int g = 0; g < 2; ++g) {
    double fpr = 0, fnr = 0, err = 0;
    bool has_fpr = true, has_fnr = true, has_err = true;
    for (const auto& r : reports) {
      has_fpr = has_fpr && r.groups[g].fpr;
      has_fnr = has_fnr && r.groups[g].fnr;
      has_err = has_err && r.groups[g].err;
      fpr += r.groups[g].fpr.value_or(0);
      fnr += r.groups[g].fnr.value_or(0);
      err += r.groups[g].err.value_or(0);
    }
    const double n = static_cast<double>(reports.size());
    if (has_fpr) rates[g].fpr = fpr / n;
    if (has_fnr) rates[g].fnr = fnr / n;
    if (has_err) rates[g].err = err / n;
  }
  out.of_mean = MetricsFromRates(
      rates, MeanOf(reports, [](const GroupMetricsReport& r) { return r.unconditional_err; }));
  out.mean_abs_dp = MeanOf(reports, [](const GroupMetricsReport& r) { return r.dp; });
  out.mean_abs_eo = MeanOf(reports, [](const GroupMetricsReport& r) { return r.eo; });
  return out;
}

RocCurve RocFromScores(std::span<const double> scores, std::span<const int> c,
                       std::span<const int> y, int group, double operating_threshold) {
  CheckLengths(scores.size(), c.size(), y.size());
  if (group != 0 && group != 1) throw std::invalid_argument("ROC group must be 0 or 1");
  std::vector<std::pair<double, int>> members;
  std::int64_t pos = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (c[i] != group) continue;
    members.emplace_back(scores[i], y[i]);
    pos += y[i];
  }
  const std::int64_t neg = static_cast<std::int64_t>(members.size()) - pos;
  if (members.empty()) throw DataError("ROC: group " + std::to_string(group) + " is empty");
  if (pos == 0 || neg == 0) {
    throw DataError("ROC: group " + std::to_string(group) + " has a single outcome class");
  }
  auto point_at = [&](double t) {
    std::int64_t tp = 0, fp = 0;
    for (const auto& [s, label] : members) {
      if (s > t) (label ? tp : fp)++;
    }
    return RocPoint{static_cast<double>(fp) / neg, static_cast<double>(tp) / pos};
  };
  // Sorting by descending score lets every threshold reuse one pass.
  std::sort(members.begin(), members.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  RocCurve curve;
  curve.group = group;
  curve.operating_threshold = operating_threshold;
  std::int64_t tp = 0, fp = 0;
  curve.points.push_back({0.0, 0.0});
  for (std::size_t i = 0; i < members.size();) {
    const double s = members[i].first;
    while (i < members.size() && members[i].first == s) {
      (members[i].second ? tp : fp)++;
      ++i;
    }
    // Threshold just below s: everything scored >= s is positive.
    curve.points.push_back({static_cast<double>(fp) / neg, static_cast<double>(tp) / pos});
  }
  curve.operating_point = point_at(operating_threshold);
  curve.points.push_back(curve.operating_point);
  std::sort(curve.points.begin(), curve.points.end());
  curve.points.erase(std::unique(curve.points.begin(), curve.points.end()), curve.points.end());
  return curve;
}

RocCurve ComputeRoc(OutcomeClassifier& classifier, const AttributedDataset& test_data, int group,
                    double operating_threshold) {
  const auto y = Column(test_data, true);
  const auto c = Column(test_data, false);
  return RocFromScores(classifier.Score(test_data), c, y, group, operating_threshold);
}

}  // namespace fairgan::evaluation
