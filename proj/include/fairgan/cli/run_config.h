// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_CLI_RUN_CONFIG_H_
#define FAIRGAN_CLI_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fairgan/core/split.h"
#include "fairgan/data/synthetic.h"
#include "fairgan/evaluation/classifier.h"
#include "fairgan/evaluation/report.h"
#include "fairgan/training/config.h"
#include "json.hpp"

namespace fairgan::cli {

// Exactly one of `manifest` and `synthetic` is set. Paths are relative to the
// config file's directory.
struct DataSection {
  std::optional<std::string> manifest;
  std::optional<data::SyntheticBiasSpec> synthetic;
  std::optional<std::string> unlabeled_manifest;
  // Required with a manifest; derived from the synthetic spec otherwise.
  std::optional<ImageShape> image_shape;

  ImageShape Shape() const;
};

struct EvalSection {
  evaluation::ClassifierConfig classifier;  // trunk defaults to model.discriminator
  std::vector<std::uint64_t> seeds = {0, 1, 2};
  double threshold = 0.5;
  bool eigen_grids = true;
  evaluation::GroupLabels group_labels = evaluation::kDefaultGroupLabels;
  // Pretrained discriminator for linear_probe mode.
  std::optional<std::string> probe_checkpoint;
};

struct RunConfig {
  DataSection data;
  SplitConfig split;
  training::ModelSpecs model;
  // Shared train settings; `train_variants[name]` overrides them per objective.
  nlohmann::json train = nlohmann::json::object();
  std::map<std::string, nlohmann::json> train_variants;
  EvalSection eval;
  std::string run_dir;  // empty: $FAIRGAN_RUN_ROOT (or ./runs) / <config stem>
  std::filesystem::path base_dir;
  std::string name = "run";

  // Resolved, validated train settings for one objective.
  training::TrainConfig TrainFor(FairnessObjective objective) const;
  // Replaces the split, train, synthetic and eval seeds (eval seeds become
  // seed, seed + 1, ...).
  void OverrideSeed(std::uint64_t seed);
  std::filesystem::path Resolve(const std::string& path) const;
  std::filesystem::path RunDir() const;
  // Cross-section checks; throws ConfigError.
  void Validate() const;
};

// Unknown keys anywhere are ConfigErrors.
RunConfig ParseRunConfig(const nlohmann::json& j, const std::filesystem::path& base_dir,
                         const std::string& name = "run");
RunConfig LoadRunConfig(const std::string& path);
// Fully resolved document, defaults included.
nlohmann::json RunConfigJson(const RunConfig& config);

inline constexpr const char* kRunRootEnv = "FAIRGAN_RUN_ROOT";

}  // namespace fairgan::cli

#endif  // FAIRGAN_CLI_RUN_CONFIG_H_
