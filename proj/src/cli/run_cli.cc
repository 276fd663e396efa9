// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include <spdlog/spdlog.h>

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "fairgan/cli/commands.h"
#include "fairgan/core/errors.h"

namespace fairgan::cli {
namespace {

RunConfig ConfigFrom(const std::string& path, const std::optional<std::uint64_t>& seed,
                     const std::string& run_dir) {
  if (path.empty()) throw ConfigError("this command needs --config");
  RunConfig config = LoadRunConfig(path);
  // Precedence: built-in defaults < config file < flags.
  if (seed) config.OverrideSeed(*seed);
  if (!run_dir.empty()) config.run_dir = std::filesystem::absolute(run_dir).string();
  config.Validate();
  return config;
}

std::pair<std::string, std::string> NamedDir(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
    throw ConfigError("--debiased expects NAME=DIR, got '" + spec + "'");
  }
  return {spec.substr(0, eq), spec.substr(eq + 1)};
}

}  // namespace

int RunCli(int argc, char** argv) {
  CLI::App app{"Fairness GAN: debiased dataset generation and fairness evaluation", "fairgan"};
  app.require_subcommand(1);
  std::string config_path, run_dir, log_level = "info";
  std::optional<std::uint64_t> seed;
  app.add_option("-c,--config", config_path, "Run config (JSON)");
  app.add_option("--seed", seed, "Replace every seed in the config (eval seeds become S, S+1, ...)");
  app.add_option("--run-dir", run_dir,
                 std::string("Run directory (default: output.run_dir, else $") + kRunRootEnv +
                     "/<config name>, else runs/<config name>)");
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  bool overwrite = false;
  auto* synth = app.add_subcommand("synth", "Write the synthetic biased dataset to disk");
  std::string synth_out;
  synth->add_option("--out", synth_out, "Output directory (default <run dir>/synth)");
  synth->add_flag("--overwrite", overwrite, "Replace a non-empty output directory");

  auto* train = app.add_subcommand("train", "Train one objective variant");
  std::string objective;
  TrainOptions train_opts;
  train->add_option("--objective", objective, "none|dp|eo")
      ->required()
      ->check(CLI::IsMember({"none", "dp", "eo"}, CLI::ignore_case));
  train->add_flag("--resume", train_opts.resume, "Continue from the latest checkpoint");
  train->add_flag("--overwrite", overwrite, "Discard an existing run of this objective");

  auto* generate = app.add_subcommand("generate", "Sample a debiased dataset from a checkpoint");
  GenerateOptions gen_opts;
  generate->add_option("--checkpoint", gen_opts.checkpoint, "Checkpoint file")->required();
  generate->add_option("-n,--n", gen_opts.n, "Number of samples")->required();
  generate->add_option("--class-marginal", gen_opts.class_marginal,
                       "P(c = 1) (default: the training split's, else 0.5)");
  generate->add_option("--out", gen_opts.out_dir, "Output directory")->required();
  generate->add_option("--threshold", gen_opts.threshold,
                       "y_hard = [y_fake > threshold] (default 0)");
  generate->add_flag("--overwrite", overwrite, "Replace a non-empty output directory");

  auto* evaluate = app.add_subcommand("evaluate", "Classifier-based fairness evaluation");
  EvaluateOptions eval_opts;
  std::vector<std::string> debiased;
  std::string dp_dir, eo_dir;
  evaluate->add_option("--dp", dp_dir, "Debiased dataset from the dp variant");
  evaluate->add_option("--eo", eo_dir, "Debiased dataset from the eo variant");
  evaluate->add_option("--debiased", debiased, "Further datasets as NAME=DIR");
  evaluate->add_option("--out", eval_opts.out_dir, "Report directory (default <run dir>/eval)");
  evaluate->add_flag("--overwrite", overwrite, "Replace a non-empty report directory");

  auto* rasterize = app.add_subcommand("rasterize", "Stroke records (ndjson) to an image directory");
  RasterizeOptions ras_opts;
  rasterize->add_option("--input", ras_opts.input, "ndjson stroke file")->required();
  rasterize->add_option("--out", ras_opts.out_dir, "Output directory")->required();
  rasterize->add_option("--size", ras_opts.size, "Raster side in pixels (default 64)");
  rasterize->add_option("--country0", ras_opts.country0, "Country code mapped to c = 0")->required();
  rasterize->add_option("--country1", ras_opts.country1, "Country code mapped to c = 1")->required();
  rasterize->add_flag("--overwrite", overwrite, "Replace a non-empty output directory");

  auto* report = app.add_subcommand("report", "Re-render tables and plots from metrics.json");
  std::string metrics_path, report_out;
  report->add_option("--metrics", metrics_path, "Stored metrics.json")->required();
  report->add_option("--out", report_out, "Output directory (default: beside metrics.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (synth->parsed()) {
      CmdSynth(ConfigFrom(config_path, seed, run_dir), synth_out, overwrite);
    } else if (train->parsed()) {
      train_opts.objective = ParseFairnessObjective(objective);
      train_opts.overwrite = overwrite;
      CmdTrain(ConfigFrom(config_path, seed, run_dir), train_opts);
    } else if (generate->parsed()) {
      gen_opts.seed = seed.value_or(0);
      gen_opts.overwrite = overwrite;
      CmdGenerate(gen_opts);
    } else if (evaluate->parsed()) {
      if (!dp_dir.empty()) eval_opts.debiased.emplace_back("dp", dp_dir);
      if (!eo_dir.empty()) eval_opts.debiased.emplace_back("eo", eo_dir);
      for (const auto& d : debiased) eval_opts.debiased.push_back(NamedDir(d));
      eval_opts.overwrite = overwrite;
      const auto outcome = CmdEvaluate(ConfigFrom(config_path, seed, run_dir), eval_opts);
      if (!outcome.undefined.empty()) {
        spdlog::error("{} metric(s) undefined; report written to {}", outcome.undefined.size(),
                      outcome.dir.string());
        return kExitNumeric;
      }
    } else if (rasterize->parsed()) {
      ras_opts.overwrite = overwrite;
      CmdRasterize(ras_opts);
    } else if (report->parsed()) {
      CmdReport(metrics_path, report_out);
    }
  } catch (const LockError& e) {
    spdlog::error("{}", e.what());
    return kExitLocked;
  } catch (const ConfigError& e) {
    spdlog::error("config: {}", e.what());
    return kExitConfig;
  } catch (const DataError& e) {
    spdlog::error("data: {}", e.what());
    return kExitData;
  } catch (const NumericError& e) {
    spdlog::error("numeric: {}", e.what());
    return kExitNumeric;
  } catch (const std::filesystem::filesystem_error& e) {
    spdlog::error("data: {}", e.what());
    return kExitData;
  } catch (const std::invalid_argument& e) {
    spdlog::error("config: {}", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitOther;
  }
  return kExitOk;
}

}  // namespace fairgan::cli
