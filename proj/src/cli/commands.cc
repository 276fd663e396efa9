// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include "fairgan/cli/commands.h"

#include <fcntl.h>
#include <spdlog/spdlog.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

#include "fairgan/core/digest.h"
#include "fairgan/core/errors.h"
#include "fairgan/data/loader.h"
#include "fairgan/data/manifest.h"
#include "fairgan/data/strokes.h"
#include "fairgan/data/synthetic.h"
#include "fairgan/evaluation/pipeline.h"
#include "fairgan/evaluation/report.h"
#include "fairgan/training/checkpoint.h"
#include "fairgan/training/trainer.h"

namespace fairgan::cli {
namespace fs = std::filesystem;
namespace {

void WriteJson(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  out << j.dump(2) << '\n';
  if (!out) throw DataError(path.string() + ": write failed");
}

nlohmann::json ReadJson(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": cannot open");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

bool HasEntriesBesidesLock(const fs::path& dir) {
  if (!fs::exists(dir)) return false;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().filename() != kLockName) return true;
  }
  return false;
}

// Call with the directory's lock held.
void RequireEmpty(const fs::path& dir, bool overwrite) {
  if (!HasEntriesBesidesLock(dir)) {
    fs::create_directories(dir);
    return;
  }
  if (!overwrite) {
    throw ConfigError("output directory " + dir.string() + " is not empty (pass --overwrite)");
  }
  spdlog::info("clearing {}", dir.string());
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().filename() != kLockName) fs::remove_all(e.path());
  }
}

// A run directory is bound to one resolved config.
void EchoConfig(const fs::path& dir, const RunConfig& config, bool overwrite) {
  const fs::path path = dir / kConfigEchoName;
  const nlohmann::json resolved = RunConfigJson(config);
  if (fs::exists(path) && !overwrite && ReadJson(path) != resolved) {
    throw ConfigError(dir.string() +
                      " was created with a different config (pass --overwrite to replace it)");
  }
  WriteJson(path, resolved);
}

double ClassMarginal(const AttributedDataset& d) {
  if (d.empty()) return 0.5;
  std::size_t ones = 0;
  for (const auto& s : d.samples) ones += s.c == 1;
  return static_cast<double>(ones) / d.size();
}

std::vector<fs::path> Checkpoints(const fs::path& dir) {
  static const std::regex kName(R"(ckpt_\d{8,}\.fgan)");
  std::vector<fs::path> out;
  if (!fs::exists(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (std::regex_match(e.path().filename().string(), kName)) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Drops loss rows at or after `step`, which a resumed run will rewrite.
void TruncateLossLog(const fs::path& path, std::int64_t step) {
  if (!fs::exists(path)) return;
  std::ifstream in(path);
  std::string line, kept;
  bool header = true;
  while (std::getline(in, line)) {
    if (!header && std::stoll(line.substr(0, line.find('\t'))) >= step) continue;
    header = false;
    kept += line + '\n';
  }
  in.close();
  std::ofstream(path, std::ios::trunc) << kept;
}

void CheckDatasetName(const std::string& name) {
  static const std::regex kSafe("[A-Za-z0-9_-]+");
  if (!std::regex_match(name, kSafe)) {
    throw ConfigError("dataset name '" + name + "' must match [A-Za-z0-9_-]+");
  }
  if (name == evaluation::kOriginalName) {
    throw ConfigError("dataset name '" + name + "' is reserved for the original data");
  }
}

}  // namespace

DirLock::DirLock(const fs::path& dir) {
  fs::create_directories(dir);
  const auto path = (dir / kLockName).string();
  fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) throw DataError(path + ": " + std::strerror(errno));
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    const int err = errno;
    ::close(fd_);
    fd_ = -1;
    if (err == EWOULDBLOCK) throw LockError(dir.string() + " is locked by another command");
    throw DataError(path + ": " + std::strerror(err));
  }
}

DirLock::~DirLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

AttributedDataset LoadOriginal(const RunConfig& config) {
  if (config.data.synthetic) {
    return data::QuantizePixels(data::SynthesizeBiasedDataset(*config.data.synthetic).dataset);
  }
  const fs::path manifest = config.Resolve(*config.data.manifest);
  auto d = data::LoadAttributedImages(manifest.parent_path().string(),
                                      data::ReadManifest(manifest.string()), config.data.Shape());
  if (!d.outcome_labeled) throw DataError(manifest.string() + ": rows carry no y column");
  return d;
}

std::optional<AttributedDataset> LoadUnlabeled(const RunConfig& config) {
  if (!config.data.unlabeled_manifest) return std::nullopt;
  const fs::path manifest = config.Resolve(*config.data.unlabeled_manifest);
  auto d = data::LoadAttributedImages(manifest.parent_path().string(),
                                      data::ReadManifest(manifest.string()), config.data.Shape());
  if (d.outcome_labeled) {
    spdlog::info("{}: ignoring y columns of the unlabeled pool", manifest.string());
    for (auto& s : d.samples) {
      s.y_hard.reset();
      s.y_soft.reset();
    }
    d.outcome_labeled = false;
  }
  return d;
}

SplitResult SplitOriginal(const RunConfig& config, const AttributedDataset& original) {
  SplitResult split = SplitDataset(original, config.split);
  for (const auto& w : split.warnings) spdlog::warn("split: {}", w);
  return split;
}

fs::path CmdSynth(const RunConfig& config, fs::path out_dir, bool overwrite) {
  if (!config.data.synthetic) throw ConfigError("synth needs a data.synthetic section");
  if (out_dir.empty()) out_dir = config.RunDir() / "synth";
  DirLock lock(out_dir);
  RequireEmpty(out_dir, overwrite);
  const auto& spec = *config.data.synthetic;
  const auto synth = data::SynthesizeBiasedDataset(spec);
  const auto dataset = data::QuantizePixels(synth.dataset);
  data::WriteAttributedDirectory(out_dir.string(), dataset);
  std::vector<int> glyph(synth.glyph.begin(), synth.glyph.end());
  WriteJson(out_dir / "ground_truth.json",
            {{"spec", spec},
             {"truth", synth.truth},
             {"dataset_digest", DatasetDigest(dataset)},
             {"glyph", glyph}});
  WriteJson(out_dir / kConfigEchoName, RunConfigJson(config));
  spdlog::info("wrote {} samples to {}", dataset.size(), out_dir.string());
  return out_dir;
}

fs::path CmdTrain(const RunConfig& config, const TrainOptions& options) {
  const fs::path run = config.RunDir();
  DirLock lock(run);
  EchoConfig(run, config, options.overwrite);
  const training::TrainConfig cfg = config.TrainFor(options.objective);
  const fs::path dir = run / ("train_" + std::string(ToString(options.objective)));
  if (!options.resume) RequireEmpty(dir, options.overwrite);

  const AttributedDataset original = LoadOriginal(config);
  const std::optional<AttributedDataset> unlabeled = LoadUnlabeled(config);
  const SplitResult split = SplitOriginal(config, original);
  spdlog::info("seeds: split {} train {}{}", config.split.seed, cfg.seed,
               config.data.synthetic
                   ? " synthetic " + std::to_string(config.data.synthetic->seed)
                   : std::string());

  std::optional<training::TrainState> state;
  if (options.resume) {
    const auto ckpts = Checkpoints(dir);
    if (!ckpts.empty()) {
      auto ck = training::LoadCheckpoint(ckpts.back().string());
      if (!(ck.config == cfg) || !(ck.specs == config.model)) {
        throw ConfigError(ckpts.back().string() + " was written with a different config");
      }
      spdlog::info("resuming from {} (step {})", ckpts.back().string(), ck.state.step);
      TruncateLossLog(dir / "loss_log.tsv", ck.state.step);
      state.emplace(std::move(ck.state));
    } else {
      spdlog::info("no checkpoint in {}; starting fresh", dir.string());
    }
  }
  if (!state) {
    state.emplace(training::InitTrainState(config.model, cfg, split.train.size(),
                                           unlabeled ? unlabeled->size() : 0));
  }

  training::TrainOutputs outputs;
  outputs.run_dir = dir.string();
  const std::int64_t every = std::max<std::int64_t>(1, cfg.total_steps / 20);
  outputs.on_step = [&](const training::TrainState& s, const training::StepResult& r) {
    if (!r.aborted && (s.step % every == 0 || s.step == cfg.total_steps)) {
      spdlog::info("[{}] step {}/{}  D {:.4f}  G {:.4f}  lr {:.3g}", ToString(cfg.objective),
                   s.step, cfg.total_steps, r.d_loss.total, r.g_loss.total, r.lr);
    }
  };
  const auto result = training::Train(*state, config.model, cfg, split.train,
                                      unlabeled ? &*unlabeled : nullptr, outputs);

  const auto ckpts = Checkpoints(dir);
  if (ckpts.empty()) throw DataError(dir.string() + ": no checkpoint was written");
  nlohmann::json names = nlohmann::json::array();
  for (const auto& p : ckpts) names.push_back(p.filename().string());
  nlohmann::json record = {
      {"command", "train"},
      {"objective", ToString(cfg.objective)},
      {"seeds",
       {{"split", config.split.seed},
        {"train", cfg.seed},
        {"synthetic", config.data.synthetic ? nlohmann::json(config.data.synthetic->seed)
                                            : nlohmann::json()}}},
      {"data",
       {{"original_digest", DatasetDigest(original)},
        {"train_digest", DatasetDigest(split.train)},
        {"test_digest", DatasetDigest(split.test)},
        {"unlabeled_digest", unlabeled ? nlohmann::json(DatasetDigest(*unlabeled))
                                       : nlohmann::json()},
        {"n_train", split.train.size()},
        {"n_test", split.test.size()},
        {"n_unlabeled", unlabeled ? unlabeled->size() : 0}}},
      {"train_class_marginal", ClassMarginal(split.train)},
      {"steps", state->step},
      {"aborted_steps", result.aborted_steps},
      {"checkpoints", names},
      {"final_checkpoint", ckpts.back().filename().string()},
      {"final_checkpoint_sha256", FileSha256Hex(ckpts.back().string())},
      {"loss_log", "loss_log.tsv"}};
  WriteJson(dir / kRunRecordName, record);
  spdlog::info("final checkpoint {} sha256 {}", ckpts.back().string(),
               record["final_checkpoint_sha256"].get<std::string>());
  return dir;
}

fs::path CmdGenerate(const GenerateOptions& options) {
  if (options.n < 1) throw ConfigError("generate: --n must be >= 1");
  if (options.out_dir.empty()) throw ConfigError("generate: --out is required");
  auto ck = training::LoadCheckpoint(options.checkpoint);
  double marginal = 0.5;
  if (options.class_marginal) {
    marginal = *options.class_marginal;
  } else if (const fs::path rec = fs::path(options.checkpoint).parent_path() / kRunRecordName;
             fs::exists(rec)) {
    marginal = ReadJson(rec).at("train_class_marginal").get<double>();
  }
  if (!(marginal >= 0 && marginal <= 1)) throw ConfigError("generate: class marginal outside [0, 1]");
  if (!(options.threshold > -1 && options.threshold < 1)) {
    throw ConfigError("generate: --threshold must lie in (-1, 1)");
  }

  const fs::path out(options.out_dir);
  DirLock lock(out);
  RequireEmpty(out, options.overwrite);
  const auto dataset = data::QuantizePixels(training::GenerateDebiasedDataset(
      ck.state.generator, options.n, marginal, options.seed, options.threshold));
  data::WriteAttributedDirectory(out.string(), dataset);
  WriteJson(out / "generate.json",
            {{"command", "generate"},
             {"checkpoint", fs::absolute(options.checkpoint).string()},
             {"checkpoint_sha256", FileSha256Hex(options.checkpoint)},
             {"checkpoint_step", ck.state.step},
             {"objective", ToString(ck.config.objective)},
             {"n", options.n},
             {"class_marginal", marginal},
             {"seed", options.seed},
             {"threshold", options.threshold},
             {"dataset_digest", DatasetDigest(dataset)}});
  spdlog::info("wrote {} generated samples to {} (P(c=1) = {})", options.n, out.string(),
               marginal);
  return out;
}

EvaluateOutcome CmdEvaluate(const RunConfig& config, const EvaluateOptions& options) {
  const fs::path out = options.out_dir.empty() ? config.RunDir() / "eval" : fs::path(options.out_dir);
  for (std::size_t i = 0; i < options.debiased.size(); ++i) {
    CheckDatasetName(options.debiased[i].first);
    for (std::size_t k = 0; k < i; ++k) {
      if (options.debiased[k].first == options.debiased[i].first) {
        throw ConfigError("dataset name '" + options.debiased[i].first + "' given twice");
      }
    }
  }
  DirLock lock(out);
  RequireEmpty(out, options.overwrite);

  const AttributedDataset original = LoadOriginal(config);
  const SplitResult split = SplitOriginal(config, original);
  std::vector<AttributedDataset> loaded;
  loaded.reserve(options.debiased.size());
  for (const auto& [name, dir] : options.debiased) {
    loaded.push_back(data::LoadAttributedDirectory(dir, config.data.Shape()));
    if (!loaded.back().outcome_labeled) throw DataError(dir + ": dataset carries no outcomes");
    spdlog::info("{}: {} samples from {}", name, loaded.back().size(), dir);
  }
  std::vector<evaluation::NamedDataset> named;
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    named.push_back({options.debiased[i].first, &loaded[i]});
  }

  std::optional<nn::Discriminator<float>> probe;
  if (config.eval.classifier.mode == evaluation::ClassifierMode::kLinearProbe) {
    probe.emplace(
        training::LoadCheckpoint(config.Resolve(*config.eval.probe_checkpoint).string())
            .state.discriminator);
  }
  evaluation::PipelineConfig pc;
  pc.classifier = config.eval.classifier;
  pc.seeds = config.eval.seeds;
  pc.threshold = config.eval.threshold;
  pc.eigen_grids = config.eval.eigen_grids;
  const auto result = evaluation::EvaluatePipeline(
      split.train, split.test, named, pc, probe ? &*probe : nullptr,
      [](const std::string& line) { spdlog::info("{}", line); });

  evaluation::WriteReport(out.string(), result, config.eval.group_labels);
  WriteJson(out / kConfigEchoName, RunConfigJson(config));
  nlohmann::json inputs = nlohmann::json::array();
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    inputs.push_back({{"name", options.debiased[i].first},
                      {"dir", fs::absolute(options.debiased[i].second).string()},
                      {"digest", DatasetDigest(loaded[i])}});
  }
  WriteJson(out / kRunRecordName,
            {{"command", "evaluate"},
             {"seeds", {{"split", config.split.seed}, {"classifier", config.eval.seeds}}},
             {"original_digest", DatasetDigest(original)},
             {"train_digest", DatasetDigest(split.train)},
             {"test_digest", result.test_digest},
             {"debiased", inputs}});
  std::cout << evaluation::FormatMetricsTable(result, config.eval.group_labels);

  EvaluateOutcome outcome{out, {}};
  const auto& labels = config.eval.group_labels;
  auto check = [&](const std::string& where, const evaluation::GroupMetricsReport& r) {
    for (int g = 0; g < 2; ++g) {
      const auto& k = r.groups[g];
      if (!k.err) outcome.undefined.push_back(where + ": error rate of " + labels[g] + " undefined (no test samples)");
      if (!k.fnr) outcome.undefined.push_back(where + ": FNR of " + labels[g] + " undefined (no positive test samples)");
      if (!k.fpr) outcome.undefined.push_back(where + ": FPR of " + labels[g] + " undefined (no negative test samples)");
    }
  };
  for (const auto& ev : result.datasets) {
    for (std::size_t k = 0; k < ev.per_seed.size(); ++k) {
      check(ev.name + " seed " + std::to_string(ev.seeds[k]), ev.per_seed[k]);
    }
    for (int g = 0; g < 2; ++g) {
      if (ev.roc[g].points.empty()) {
        outcome.undefined.push_back(ev.name + ": ROC of " + labels[g] +
                                    " undefined (group lacks an outcome class)");
      }
    }
  }
  for (const auto& u : outcome.undefined) spdlog::error("{}", u);
  return outcome;
}

fs::path CmdRasterize(const RasterizeOptions& options) {
  if (options.input.empty() || options.out_dir.empty()) {
    throw ConfigError("rasterize: --input and --out are required");
  }
  if (options.country0.empty() || options.country1.empty() ||
      options.country0 == options.country1) {
    throw ConfigError("rasterize: --country0 and --country1 must be two distinct codes");
  }
  const auto records = data::ReadStrokeRecordsFile(options.input);
  const auto dataset =
      data::StrokeRecordsToDataset(records, options.size, options.country0, options.country1);
  if (dataset.empty()) {
    throw DataError(options.input + ": no records from " + options.country0 + " or " +
                    options.country1);
  }
  const fs::path out(options.out_dir);
  DirLock lock(out);
  RequireEmpty(out, options.overwrite);
  data::WriteAttributedDirectory(out.string(), dataset);
  WriteJson(out / "rasterize.json",
            {{"command", "rasterize"},
             {"input", fs::absolute(options.input).string()},
             {"input_sha256", FileSha256Hex(options.input)},
             {"size", options.size},
             {"country0", options.country0},
             {"country1", options.country1},
             {"records", records.size()},
             {"samples", dataset.size()},
             {"dataset_digest", DatasetDigest(dataset)}});
  spdlog::info("rasterized {} of {} records into {}", dataset.size(), records.size(),
               out.string());
  return out;
}

fs::path CmdReport(const std::string& metrics_json, std::string out_dir) {
  evaluation::GroupLabels labels;
  const auto result = evaluation::ParseReportJson(ReadJson(metrics_json), &labels);
  fs::path out = out_dir.empty() ? fs::path(metrics_json).parent_path() : fs::path(out_dir);
  if (out.empty()) out = ".";
  DirLock lock(out);
  evaluation::WriteReport(out.string(), result, labels);
  std::cout << evaluation::FormatMetricsTable(result, labels);
  return out;
}

}  // namespace fairgan::cli
