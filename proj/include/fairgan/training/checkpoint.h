// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_TRAINING_CHECKPOINT_H_
#define FAIRGAN_TRAINING_CHECKPOINT_H_

#include <string>

#include "fairgan/training/config.h"
#include "fairgan/training/trainer.h"

namespace fairgan::training {

struct Checkpoint {
  ModelSpecs specs;
  TrainConfig config;
  TrainState state;
};

// Parameter archive holding both networks, their buffers and Adam moments,
// with specs, config, step and generator states in the header.
void SaveCheckpoint(const std::string& path, const TrainState& state, const ModelSpecs& specs,
                    const TrainConfig& cfg);

// Throws std::runtime_error on unreadable or incompatible files.
Checkpoint LoadCheckpoint(const std::string& path);

// Checkpoint file name for a step, e.g. "ckpt_00001000.fgan".
std::string CheckpointName(std::int64_t step);

}  // namespace fairgan::training

#endif  // FAIRGAN_TRAINING_CHECKPOINT_H_
