// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include "fairgan/evaluation/report.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "fairgan/core/errors.h"

namespace fairgan::evaluation {
namespace {

nlohmann::json Num(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json();
}

std::string Cell(const std::optional<double>& v) { return v ? fmt::format("{:.4f}", *v) : "n/a"; }

std::string CsvNum(const std::optional<double>& v) {
  return v ? fmt::format("{:.9g}", *v) : "";
}

nlohmann::json RatesJson(const GroupMetricsReport& r, const GroupLabels& labels) {
  nlohmann::json j;
  for (int g = 0; g < 2; ++g) {
    j["groups"][labels[g]] = {{"fpr", Num(r.groups[g].fpr)},
                              {"fnr", Num(r.groups[g].fnr)},
                              {"err", Num(r.groups[g].err)}};
    if (r.counts) {
      const auto& k = (*r.counts)[g];
      j["groups"][labels[g]]["counts"] = {{"tp", k.tp}, {"fp", k.fp}, {"tn", k.tn}, {"fn", k.fn}};
    }
  }
  j["unconditional_err"] = Num(r.unconditional_err);
  j["dp"] = Num(r.dp);
  j["eo"] = Num(r.eo);
  return j;
}

void WriteFile(const std::filesystem::path& path, const std::string& text,
               std::vector<std::string>& written) {
  std::ofstream out(path);
  out << text;
  if (!out) throw DataError(path.string() + ": write failed");
  written.push_back(path.string());
}

struct Canvas {
  data::Image8 img;
  void Put(int x, int y, std::array<std::uint8_t, 3> rgb) {
    if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
    std::copy(rgb.begin(), rgb.end(), img.pixels.begin() + (static_cast<std::size_t>(y) * img.width + x) * 3);
  }
  void Line(double x0, double y0, double x1, double y1, std::array<std::uint8_t, 3> rgb,
            int dash = 0) {
    const int n = std::max(1, static_cast<int>(std::ceil(std::max(std::abs(x1 - x0), std::abs(y1 - y0)))));
    for (int k = 0; k <= n; ++k) {
      if (dash && (k / dash) % 2) continue;
      const double t = static_cast<double>(k) / n;
      Put(static_cast<int>(std::lround(x0 + t * (x1 - x0))),
          static_cast<int>(std::lround(y0 + t * (y1 - y0))), rgb);
    }
  }
};

std::optional<double> OptNum(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

GroupMetricsReport ParseRates(const nlohmann::json& j, const GroupLabels& labels) {
  GroupMetricsReport r;
  bool has_counts = true;
  GroupConfusion counts;
  for (int g = 0; g < 2; ++g) {
    const auto& gj = j.at("groups").at(labels[g]);
    r.groups[g] = {OptNum(gj, "fpr"), OptNum(gj, "fnr"), OptNum(gj, "err")};
    if (gj.contains("counts")) {
      const auto& k = gj.at("counts");
      counts[g] = {k.at("tp").get<std::int64_t>(), k.at("fp").get<std::int64_t>(),
                   k.at("tn").get<std::int64_t>(), k.at("fn").get<std::int64_t>()};
    } else {
      has_counts = false;
    }
  }
  if (has_counts) r.counts = counts;
  r.unconditional_err = OptNum(j, "unconditional_err");
  r.dp = OptNum(j, "dp");
  r.eo = OptNum(j, "eo");
  return r;
}

}  // namespace

std::string DisplayName(const std::string& name) {
  if (name == kOriginalName) return "Without Debiasing";
  if (name == "dp") return "Fairness GAN DP";
  if (name == "eo") return "Fairness GAN Eq Opp";
  return name;
}

PipelineResult ParseReportJson(const nlohmann::json& j, GroupLabels* labels_out) {
  try {
    PipelineResult result;
    result.test_digest = j.at("test_digest").get<std::string>();
    result.test_size = j.at("test_size").get<std::size_t>();
    const auto labels = j.at("group_labels").get<GroupLabels>();
    for (const auto& d : j.at("datasets")) {
      DatasetEvaluation ev;
      ev.name = d.at("name").get<std::string>();
      ev.train_digest = d.at("train_digest").get<std::string>();
      for (const auto& s : d.at("per_seed")) {
        ev.seeds.push_back(s.at("seed").get<std::uint64_t>());
        ev.per_seed.push_back(ParseRates(s, labels));
      }
      const auto& m = d.at("mean");
      ev.mean.of_mean = ParseRates(m, labels);
      ev.mean.mean_abs_dp = OptNum(m, "dp_mean_abs");
      ev.mean.mean_abs_eo = OptNum(m, "eo_mean_abs");
      ev.mean.n = m.at("n_seeds").get<std::size_t>();
      for (int g = 0; g < 2; ++g) {
        const auto& rj = d.at("roc").at(labels[g]);
        ev.roc[g].group = g;
        for (const auto& p : rj.at("points")) {
          ev.roc[g].points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        }
        ev.roc[g].operating_threshold = rj.at("operating_threshold").get<double>();
        const auto& op = rj.at("operating_point");
        ev.roc[g].operating_point = {op.at(0).get<double>(), op.at(1).get<double>()};
      }
      result.datasets.push_back(std::move(ev));
    }
    if (labels_out) *labels_out = labels;
    return result;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed metrics document: ") + e.what());
  }
}

nlohmann::json ReportJson(const PipelineResult& result, const GroupLabels& labels) {
  nlohmann::json j;
  j["test_digest"] = result.test_digest;
  j["test_size"] = result.test_size;
  j["group_labels"] = labels;
  j["datasets"] = nlohmann::json::array();
  for (const auto& ev : result.datasets) {
    nlohmann::json d;
    d["name"] = ev.name;
    d["display_name"] = DisplayName(ev.name);
    d["train_digest"] = ev.train_digest;
    d["per_seed"] = nlohmann::json::array();
    for (std::size_t k = 0; k < ev.per_seed.size(); ++k) {
      auto r = RatesJson(ev.per_seed[k], labels);
      r["seed"] = ev.seeds[k];
      d["per_seed"].push_back(std::move(r));
    }
    d["mean"] = RatesJson(ev.mean.of_mean, labels);
    d["mean"]["dp_mean_abs"] = Num(ev.mean.mean_abs_dp);
    d["mean"]["eo_mean_abs"] = Num(ev.mean.mean_abs_eo);
    d["mean"]["n_seeds"] = ev.mean.n;
    for (int g = 0; g < 2; ++g) {
      nlohmann::json pts = nlohmann::json::array();
      for (const auto& p : ev.roc[g].points) pts.push_back({p.fpr, p.tpr});
      d["roc"][labels[g]] = {{"points", pts},
                             {"operating_threshold", ev.roc[g].operating_threshold},
                             {"operating_point",
                              {ev.roc[g].operating_point.fpr, ev.roc[g].operating_point.tpr}}};
    }
    for (int g = 0; g < 2; ++g)
      for (int o = 0; o < 2; ++o) {
        const auto& grid = ev.grids[g][o];
        const std::string key = labels[g] + ",y=" + std::to_string(o);
        d["eigen_grids"][key] =
            grid ? nlohmann::json{{"count", grid->count},
                                  {"s1", grid->s1},
                                  {"s2", grid->s2},
                                  {"degenerate", grid->degenerate}}
                 : nlohmann::json();
      }
    j["datasets"].push_back(std::move(d));
  }
  return j;
}

std::string FormatMetricsTable(const PipelineResult& result, const GroupLabels& labels) {
  constexpr int kLabel = 46, kCol = 10;
  std::string out = fmt::format("{:<{}}", "", kLabel);
  for (const auto& ev : result.datasets) out += fmt::format("| {:^{}} ", DisplayName(ev.name), 2 * kCol);
  out += "\n" + fmt::format("{:<{}}", "", kLabel);
  for (std::size_t i = 0; i < result.datasets.size(); ++i) {
    out += fmt::format("| {:^{}}{:^{}} ", labels[0], kCol, labels[1], kCol);
  }
  out += "\n";
  auto pair_row = [&](const char* name, std::optional<double> GroupRates::*field) {
    out += fmt::format("{:<{}}", name, kLabel);
    for (const auto& ev : result.datasets) {
      const auto& g = ev.mean.of_mean.groups;
      out += fmt::format("| {:^{}}{:^{}} ", Cell(g[0].*field), kCol, Cell(g[1].*field), kCol);
    }
    out += "\n";
  };
  auto span_row = [&](const char* name, auto get) {
    out += fmt::format("{:<{}}", name, kLabel);
    for (const auto& ev : result.datasets) out += fmt::format("| {:^{}} ", Cell(get(ev)), 2 * kCol);
    out += "\n";
  };
  pair_row("False Positive Rate", &GroupRates::fpr);
  pair_row("False Negative Rate", &GroupRates::fnr);
  pair_row("Error Rate", &GroupRates::err);
  span_row("Unconditional Error Rate",
           [](const DatasetEvaluation& e) { return e.mean.of_mean.unconditional_err; });
  span_row("Demographic Parity", [](const DatasetEvaluation& e) { return e.mean.of_mean.dp; });
  span_row("Equality of Opportunity", [](const DatasetEvaluation& e) { return e.mean.of_mean.eo; });
  span_row("Demographic Parity (mean per-seed gap)",
           [](const DatasetEvaluation& e) { return e.mean.mean_abs_dp; });
  span_row("Equality of Opportunity (mean per-seed gap)",
           [](const DatasetEvaluation& e) { return e.mean.mean_abs_eo; });
  const std::size_t seeds = result.datasets.empty() ? 0 : result.datasets[0].seeds.size();
  out += fmt::format("\nrates averaged over {} classifier seed(s); test set {} samples, sha256 {}\n",
                     seeds, result.test_size, result.test_digest);
  return out;
}

std::string MetricsCsv(const PipelineResult& result) {
  std::string out =
      "dataset,seed,fpr_0,fpr_1,fnr_0,fnr_1,err_0,err_1,unconditional_err,dp,eo,"
      "dp_mean_abs,eo_mean_abs\n";
  auto row = [&](const std::string& name, const std::string& seed, const GroupMetricsReport& r,
                 std::optional<double> dp_abs, std::optional<double> eo_abs) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", name, seed,
                       CsvNum(r.groups[0].fpr), CsvNum(r.groups[1].fpr), CsvNum(r.groups[0].fnr),
                       CsvNum(r.groups[1].fnr), CsvNum(r.groups[0].err), CsvNum(r.groups[1].err),
                       CsvNum(r.unconditional_err), CsvNum(r.dp), CsvNum(r.eo), CsvNum(dp_abs),
                       CsvNum(eo_abs));
  };
  for (const auto& ev : result.datasets) {
    for (std::size_t k = 0; k < ev.per_seed.size(); ++k) {
      row(ev.name, std::to_string(ev.seeds[k]), ev.per_seed[k], ev.per_seed[k].dp,
          ev.per_seed[k].eo);
    }
    row(ev.name, "mean", ev.mean.of_mean, ev.mean.mean_abs_dp, ev.mean.mean_abs_eo);
  }
  return out;
}

std::string RocCsv(const PipelineResult& result) {
  std::string out = "dataset,group,fpr,tpr,operating\n";
  for (const auto& ev : result.datasets)
    for (int g = 0; g < 2; ++g) {
      for (const auto& p : ev.roc[g].points) {
        out += fmt::format("{},{},{:.9g},{:.9g},{}\n", ev.name, g, p.fpr, p.tpr,
                           p == ev.roc[g].operating_point ? 1 : 0);
      }
    }
  return out;
}

data::Image8 RenderRocPlot(const DatasetEvaluation& ev, int size) {
  if (size < 64) throw std::invalid_argument("ROC plot size must be >= 64");
  Canvas cv{{size, size, 3, std::vector<std::uint8_t>(static_cast<std::size_t>(size) * size * 3, 255)}};
  const double m = size / 10.0, span = size - 2 * m;
  auto px = [&](double fpr) { return m + fpr * span; };
  auto py = [&](double tpr) { return size - m - tpr * span; };
  const std::array<std::uint8_t, 3> black = {0, 0, 0}, gray = {160, 160, 160};
  const std::array<std::array<std::uint8_t, 3>, 2> color = {{{31, 119, 180}, {214, 39, 40}}};
  cv.Line(px(0), py(0), px(1), py(1), gray, 4);
  cv.Line(px(0), py(0), px(1), py(0), black);
  cv.Line(px(0), py(0), px(0), py(1), black);
  cv.Line(px(1), py(0), px(1), py(1), black);
  cv.Line(px(0), py(1), px(1), py(1), black);
  for (double t : {0.25, 0.5, 0.75}) {
    cv.Line(px(t), py(0), px(t), py(0) + 4, black);
    cv.Line(px(0), py(t), px(0) - 4, py(t), black);
  }
  for (int g = 0; g < 2; ++g) {
    const auto& pts = ev.roc[g].points;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      for (int w = 0; w < 2; ++w) {
        cv.Line(px(pts[i - 1].fpr) + w, py(pts[i - 1].tpr), px(pts[i].fpr) + w, py(pts[i].tpr),
                color[g]);
      }
    }
  }
  for (int g = 0; g < 2; ++g) {
    if (ev.roc[g].points.empty()) continue;
    const int cx = static_cast<int>(std::lround(px(ev.roc[g].operating_point.fpr)));
    const int cy = static_cast<int>(std::lround(py(ev.roc[g].operating_point.tpr)));
    for (int dy = -4; dy <= 4; ++dy)
      for (int dx = -4; dx <= 4; ++dx) {
        const bool edge = std::abs(dx) == 4 || std::abs(dy) == 4;
        cv.Put(cx + dx, cy + dy, edge ? black : color[g]);
      }
  }
  return cv.img;
}

std::vector<std::string> WriteReport(const std::string& dir, const PipelineResult& result,
                                     const GroupLabels& labels) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  fs::create_directories(root / "grids");
  std::vector<std::string> written;
  WriteFile(root / "metrics.json", ReportJson(result, labels).dump(2) + "\n", written);
  WriteFile(root / "metrics.csv", MetricsCsv(result), written);
  WriteFile(root / "metrics.txt", FormatMetricsTable(result, labels), written);
  WriteFile(root / "roc.csv", RocCsv(result), written);
  for (const auto& ev : result.datasets) {
    const auto roc_path = (root / ("roc_" + ev.name + ".png")).string();
    data::WritePng(roc_path, RenderRocPlot(ev));
    written.push_back(roc_path);
    for (int g = 0; g < 2; ++g)
      for (int o = 0; o < 2; ++o) {
        const auto& grid = ev.grids[g][o];
        if (!grid) continue;
        const auto path =
            (root / "grids" / fmt::format("{}_g{}_y{}.png", ev.name, g, o)).string();
        data::WritePng(path, data::FromUnitChw(grid->Composite(), grid->CompositeShape()));
        written.push_back(path);
      }
  }
  return written;
}

}  // namespace fairgan::evaluation
