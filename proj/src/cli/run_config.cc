// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include "fairgan/cli/run_config.h"

#include <cstdlib>
#include <fstream>

#include "fairgan/core/errors.h"
#include "fairgan/core/json_fields.h"

namespace fairgan::cli {
namespace {

constexpr const char* kObjectives[] = {"none", "dp", "eo"};

template <typename T>
T Parse(const nlohmann::json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

void to_json(nlohmann::json& j, const SplitConfig& s) {
  j = {{"test_fraction", s.test_fraction},
       {"seed", s.seed},
       {"stratify_on_c", s.stratify_on_c},
       {"stratify_on_y", s.stratify_on_y}};
}

SplitConfig ParseSplit(const nlohmann::json& j) {
  RejectUnknownKeys(j, {"test_fraction", "seed", "stratify_on_c", "stratify_on_y"}, "split");
  SplitConfig s;
  ReadField(j, "test_fraction", s.test_fraction);
  ReadField(j, "seed", s.seed);
  ReadField(j, "stratify_on_c", s.stratify_on_c);
  ReadField(j, "stratify_on_y", s.stratify_on_y);
  if (!(s.test_fraction > 0 && s.test_fraction < 1)) {
    throw ConfigError("split: test_fraction must lie in (0, 1)");
  }
  return s;
}

DataSection ParseData(const nlohmann::json& j) {
  RejectUnknownKeys(j, {"manifest", "synthetic", "unlabeled_manifest", "image_shape"}, "data");
  DataSection d;
  if (j.contains("manifest")) d.manifest = Parse<std::string>(j.at("manifest"), "data.manifest");
  if (j.contains("synthetic")) {
    d.synthetic = Parse<data::SyntheticBiasSpec>(j.at("synthetic"), "data.synthetic");
  }
  if (j.contains("unlabeled_manifest")) {
    d.unlabeled_manifest = Parse<std::string>(j.at("unlabeled_manifest"), "data.unlabeled_manifest");
  }
  if (j.contains("image_shape")) {
    d.image_shape = Parse<ImageShape>(j.at("image_shape"), "data.image_shape");
  }
  if (d.manifest.has_value() == d.synthetic.has_value()) {
    throw ConfigError("data: give exactly one of 'manifest' and 'synthetic'");
  }
  if (d.manifest && !d.image_shape) throw ConfigError("data: 'image_shape' is required with a manifest");
  if (d.synthetic && d.image_shape && *d.image_shape != d.Shape()) {
    throw ConfigError("data: image_shape disagrees with the synthetic image_size");
  }
  return d;
}

EvalSection ParseEval(const nlohmann::json& j, const nn::DiscriminatorSpec& trunk) {
  RejectUnknownKeys(j,
                    {"classifier", "seeds", "threshold", "eigen_grids", "group_labels",
                     "probe_checkpoint"},
                    "eval");
  EvalSection e;
  e.classifier.trunk = trunk;
  if (j.contains("classifier")) {
    try {
      evaluation::from_json(j.at("classifier"), e.classifier);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& ex) {
      throw ConfigError(std::string("eval.classifier: ") + ex.what());
    }
  }
  ReadField(j, "seeds", e.seeds);
  ReadField(j, "threshold", e.threshold);
  ReadField(j, "eigen_grids", e.eigen_grids);
  ReadField(j, "group_labels", e.group_labels);
  if (j.contains("probe_checkpoint")) {
    e.probe_checkpoint = Parse<std::string>(j.at("probe_checkpoint"), "eval.probe_checkpoint");
  }
  if (e.seeds.empty()) throw ConfigError("eval: seeds must not be empty");
  if (!(e.threshold > 0 && e.threshold < 1)) throw ConfigError("eval: threshold must lie in (0, 1)");
  return e;
}

}  // namespace

ImageShape DataSection::Shape() const {
  if (synthetic) return {1, synthetic->image_size, synthetic->image_size};
  return image_shape.value();
}

training::TrainConfig RunConfig::TrainFor(FairnessObjective objective) const {
  nlohmann::json merged = train;
  const std::string key(ToString(objective));
  if (auto it = train_variants.find(key); it != train_variants.end()) {
    for (const auto& [k, v] : it->second.items()) merged[k] = v;
  }
  merged["objective"] = key;
  return Parse<training::TrainConfig>(merged, "train (" + key + ")");
}

void RunConfig::OverrideSeed(std::uint64_t seed) {
  split.seed = seed;
  train["seed"] = seed;
  for (auto& [name, v] : train_variants) v.erase("seed");
  if (data.synthetic) data.synthetic->seed = seed;
  for (std::size_t k = 0; k < eval.seeds.size(); ++k) eval.seeds[k] = seed + k;
}

std::filesystem::path RunConfig::Resolve(const std::string& path) const {
  const std::filesystem::path p(path);
  return p.is_absolute() ? p : base_dir / p;
}

std::filesystem::path RunConfig::RunDir() const {
  if (!run_dir.empty()) return Resolve(run_dir);
  const char* root = std::getenv(kRunRootEnv);
  return std::filesystem::path(root && *root ? root : "runs") / name;
}

void RunConfig::Validate() const {
  if (model.generator.image_shape != data.Shape()) {
    throw ConfigError("model image_shape " + model.generator.image_shape.ToString() +
                      " does not match the data's " + data.Shape().ToString());
  }
  for (FairnessObjective o : {FairnessObjective::kNone, FairnessObjective::kDp,
                              FairnessObjective::kEo}) {
    TrainFor(o);
  }
  if (eval.classifier.mode == evaluation::ClassifierMode::kLinearProbe && !eval.probe_checkpoint) {
    throw ConfigError("eval: linear_probe mode needs 'probe_checkpoint'");
  }
  if (eval.classifier.mode == evaluation::ClassifierMode::kFull &&
      eval.classifier.trunk.image_shape != data.Shape()) {
    throw ConfigError("eval.classifier.trunk image_shape does not match the data");
  }
}

RunConfig ParseRunConfig(const nlohmann::json& j, const std::filesystem::path& base_dir,
                         const std::string& name) {
  RejectUnknownKeys(j, {"data", "split", "model", "train", "eval", "output"}, "config");
  RunConfig c;
  c.base_dir = base_dir;
  c.name = name;
  if (!j.contains("data")) throw ConfigError("config: missing 'data' section");
  c.data = ParseData(j.at("data"));
  if (j.contains("split")) c.split = ParseSplit(j.at("split"));
  nlohmann::json model = j.value("model", nlohmann::json::object());
  if (!model.contains("image_shape")) model["image_shape"] = c.data.Shape();
  c.model = Parse<training::ModelSpecs>(model, "model");
  if (j.contains("train")) {
    const auto& t = j.at("train");
    if (!t.is_object()) throw ConfigError("train must be an object");
    c.train = t;
    if (t.contains("variants")) {
      c.train.erase("variants");
      const auto& v = t.at("variants");
      RejectUnknownKeys(v, {kObjectives[0], kObjectives[1], kObjectives[2]}, "train.variants");
      for (const auto& [k, over] : v.items()) {
        if (!over.is_object()) throw ConfigError("train.variants." + k + " must be an object");
        if (over.contains("objective")) {
          throw ConfigError("train.variants." + k + ": the objective is implied by the name");
        }
        c.train_variants[k] = over;
      }
    }
    if (c.train.contains("objective")) {
      throw ConfigError("train: 'objective' is chosen per command (train --objective)");
    }
  }
  c.eval = ParseEval(j.value("eval", nlohmann::json::object()), c.model.discriminator);
  if (j.contains("output")) {
    RejectUnknownKeys(j.at("output"), {"run_dir"}, "output");
    ReadField(j.at("output"), "run_dir", c.run_dir);
  }
  c.Validate();
  return c;
}

RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  const std::filesystem::path p(path);
  return ParseRunConfig(j, p.has_parent_path() ? p.parent_path() : ".", p.stem().string());
}

nlohmann::json RunConfigJson(const RunConfig& c) {
  nlohmann::json data;
  if (c.data.manifest) data["manifest"] = *c.data.manifest;
  if (c.data.synthetic) data["synthetic"] = *c.data.synthetic;
  if (c.data.unlabeled_manifest) data["unlabeled_manifest"] = *c.data.unlabeled_manifest;
  data["image_shape"] = c.data.Shape();
  nlohmann::json train = c.TrainFor(FairnessObjective::kNone);
  train.erase("objective");
  nlohmann::json variants = nlohmann::json::object();
  for (const auto& [k, v] : c.train_variants) variants[k] = v;
  train["variants"] = variants;
  nlohmann::json eval = {{"classifier", c.eval.classifier},
                         {"seeds", c.eval.seeds},
                         {"threshold", c.eval.threshold},
                         {"eigen_grids", c.eval.eigen_grids},
                         {"group_labels", c.eval.group_labels}};
  if (c.eval.probe_checkpoint) eval["probe_checkpoint"] = *c.eval.probe_checkpoint;
  nlohmann::json split;
  to_json(split, c.split);
  return {{"data", data},   {"split", split}, {"model", c.model},
          {"train", train}, {"eval", eval},   {"output", {{"run_dir", c.RunDir().string()}}}};
}

}  // namespace fairgan::cli
