// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_CLI_COMMANDS_H_
#define FAIRGAN_CLI_COMMANDS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fairgan/cli/run_config.h"
#include "fairgan/core/dataset.h"
#include "fairgan/core/split.h"

namespace fairgan::cli {

// Process exit statuses.
enum ExitCode : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitConfig = 2,   // schema or flag rejection
  kExitData = 3,     // unreadable, malformed or incompatible inputs
  kExitNumeric = 4,  // divergence or an undefined metric
  kExitLocked = 5,   // another command holds the directory
};

class LockError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-blocking exclusive flock on <dir>/.lock for the object's lifetime.
// Creates `dir` if needed; throws LockError when another process holds it.
class DirLock {
 public:
  explicit DirLock(const std::filesystem::path& dir);
  ~DirLock();
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

 private:
  int fd_ = -1;
};

inline constexpr const char* kLockName = ".lock";
inline constexpr const char* kConfigEchoName = "config.json";
inline constexpr const char* kRunRecordName = "run.json";

// The configured dataset; synthetic data is quantized to 8 bits so it equals
// what `synth` writes.
AttributedDataset LoadOriginal(const RunConfig& config);
// The unlabeled pool, labels dropped; nullopt when not configured.
std::optional<AttributedDataset> LoadUnlabeled(const RunConfig& config);
SplitResult SplitOriginal(const RunConfig& config, const AttributedDataset& original);

// All commands return the directory they wrote.
std::filesystem::path CmdSynth(const RunConfig& config, std::filesystem::path out_dir,
                               bool overwrite);

struct TrainOptions {
  FairnessObjective objective = FairnessObjective::kDp;
  bool resume = false;
  bool overwrite = false;
};
// Writes <run_dir>/train_<objective>/ with checkpoints, loss_log.tsv and
// run.json (seeds, data digests, class marginal, final checkpoint digest).
std::filesystem::path CmdTrain(const RunConfig& config, const TrainOptions& options);

struct GenerateOptions {
  std::string checkpoint;
  std::int64_t n = 0;
  // Defaults to the training split's P(C = 1) recorded next to the
  // checkpoint, else 0.5.
  std::optional<double> class_marginal;
  std::uint64_t seed = 0;
  std::string out_dir;
  double threshold = 0.0;
  bool overwrite = false;
};
std::filesystem::path CmdGenerate(const GenerateOptions& options);

struct EvaluateOptions {
  // (name, directory) per debiased dataset, in report order.
  std::vector<std::pair<std::string, std::string>> debiased;
  std::string out_dir;  // default <run_dir>/eval
  bool overwrite = false;
};
struct EvaluateOutcome {
  std::filesystem::path dir;
  // One line per metric that could not be computed.
  std::vector<std::string> undefined;
};
EvaluateOutcome CmdEvaluate(const RunConfig& config, const EvaluateOptions& options);

struct RasterizeOptions {
  std::string input;
  std::string out_dir;
  int size = 64;
  std::string country0;
  std::string country1;
  bool overwrite = false;
};
std::filesystem::path CmdRasterize(const RasterizeOptions& options);

// Re-renders tables, CSVs and ROC plots from a stored metrics.json into
// `out_dir` (default: the document's directory).
std::filesystem::path CmdReport(const std::string& metrics_json, std::string out_dir);

// Every subcommand behind one argv entry point; returns the exit status.
int RunCli(int argc, char** argv);

}  // namespace fairgan::cli

#endif  // FAIRGAN_CLI_COMMANDS_H_
