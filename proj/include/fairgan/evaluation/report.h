// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_EVALUATION_REPORT_H_
#define FAIRGAN_EVALUATION_REPORT_H_

#include <array>
#include <string>
#include <vector>

#include "fairgan/data/image_io.h"
#include "fairgan/evaluation/pipeline.h"
#include "json.hpp"

namespace fairgan::evaluation {

using GroupLabels = std::array<std::string, 2>;
inline const GroupLabels kDefaultGroupLabels = {"c=0", "c=1"};

// Table heading for a dataset: "Without Debiasing" for the original and
// "Fairness GAN DP" / "Fairness GAN Eq Opp" for the dp / eo variants; other
// names are shown as given.
std::string DisplayName(const std::string& name);

// One document with per-seed and mean reports, both dp/eo aggregations,
// confusion counts, ROC curves and dataset digests. Absent rates are null.
nlohmann::json ReportJson(const PipelineResult& result, const GroupLabels& labels);

// Inverse of ReportJson, without eigen grids (only their summaries are
// stored). Throws DataError on a malformed document.
PipelineResult ParseReportJson(const nlohmann::json& j, GroupLabels* labels = nullptr);

// Plain-text table, one column pair per dataset, rows FPR, FNR, error per
// group, then unconditional error, DP and EO (rates averaged first), then DP
// and EO as the mean of per-seed gaps.
std::string FormatMetricsTable(const PipelineResult& result, const GroupLabels& labels);

// Machine-readable rows: one per (dataset, seed) plus one `mean` row each.
std::string MetricsCsv(const PipelineResult& result);
// Columns dataset, group, fpr, tpr, operating (1 for the threshold mark).
std::string RocCsv(const PipelineResult& result);

// ROC plot on a white square: group 0 blue, group 1 red, chance diagonal in
// gray and a filled square at each threshold mark.
data::Image8 RenderRocPlot(const DatasetEvaluation& evaluation, int size = 320);

// Writes metrics.json, metrics.csv, metrics.txt, roc.csv, roc_<dataset>.png and
// grids/<dataset>_g<c>_y<y>.png under `dir`. Returns the written paths.
std::vector<std::string> WriteReport(const std::string& dir, const PipelineResult& result,
                                     const GroupLabels& labels = kDefaultGroupLabels);

}  // namespace fairgan::evaluation

#endif  // FAIRGAN_EVALUATION_REPORT_H_
