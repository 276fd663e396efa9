// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include "fairgan/training/checkpoint.h"

#include <cstdio>
#include <sstream>

#include "fairgan/core/errors.h"
#include "fairgan/nn/archive.h"

namespace fairgan::training {
namespace {

constexpr const char* kKind = "fairgan-checkpoint";

std::string RngText(const std::mt19937_64& rng) {
  std::ostringstream out;
  out << rng;
  return out.str();
}

std::mt19937_64 ParseRng(const std::string& text) {
  std::mt19937_64 rng;
  std::istringstream in(text);
  in >> rng;
  if (!in) throw DataError("checkpoint: corrupt generator state");
  return rng;
}

}  // namespace

std::string CheckpointName(std::int64_t step) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "ckpt_%08lld.fgan", static_cast<long long>(step));
  return buf;
}

void SaveCheckpoint(const std::string& path, const TrainState& state, const ModelSpecs& specs,
                    const TrainConfig& cfg) {
  nn::Archive a;
  a.header = {{"kind", kKind},
              {"specs", specs},
              {"config", cfg},
              {"step", state.step},
              {"g_adam_t", state.g_adam.t},
              {"d_adam_t", state.d_adam.t},
              {"rng", RngText(state.rng)},
              {"data_rng", RngText(state.data_rng)},
              {"labeled_sampler", state.labeled_sampler.ToJson()},
              {"unlabeled_sampler", state.unlabeled_sampler.ToJson()}};
  nn::PutPrefixed(a.tensors, "g", state.generator.params());
  nn::PutPrefixed(a.tensors, "g_buffers", state.generator.buffers());
  nn::PutPrefixed(a.tensors, "d", state.discriminator.params());
  nn::PutPrefixed(a.tensors, "d_buffers", state.discriminator.buffers());
  nn::PutPrefixed(a.tensors, "g_adam_m", state.g_adam.m);
  nn::PutPrefixed(a.tensors, "g_adam_v", state.g_adam.v);
  nn::PutPrefixed(a.tensors, "d_adam_m", state.d_adam.m);
  nn::PutPrefixed(a.tensors, "d_adam_v", state.d_adam.v);
  nn::WriteArchive(path, a);
}

Checkpoint LoadCheckpoint(const std::string& path) {
  const nn::Archive a = nn::ReadArchive(path);
  const auto& h = a.header;
  if (h.value("kind", "") != kKind) {
    throw DataError(path + " is not a training checkpoint");
  }
  try {
    const auto specs = h.at("specs").get<ModelSpecs>();
    const auto cfg = h.at("config").get<TrainConfig>();
    TrainState state(nn::Generator<float>(specs.generator, nn::TakePrefixed(a.tensors, "g"),
                                          nn::TakePrefixed(a.tensors, "g_buffers")),
                     nn::Discriminator<float>(specs.discriminator,
                                              nn::TakePrefixed(a.tensors, "d"),
                                              nn::TakePrefixed(a.tensors, "d_buffers")));
    state.step = h.at("step").get<std::int64_t>();
    state.g_adam = {nn::TakePrefixed(a.tensors, "g_adam_m"),
                    nn::TakePrefixed(a.tensors, "g_adam_v"), h.at("g_adam_t").get<std::int64_t>()};
    state.d_adam = {nn::TakePrefixed(a.tensors, "d_adam_m"),
                    nn::TakePrefixed(a.tensors, "d_adam_v"), h.at("d_adam_t").get<std::int64_t>()};
    state.rng = ParseRng(h.at("rng").get<std::string>());
    state.data_rng = ParseRng(h.at("data_rng").get<std::string>());
    state.labeled_sampler = EpochSampler::FromJson(h.at("labeled_sampler"));
    state.unlabeled_sampler = EpochSampler::FromJson(h.at("unlabeled_sampler"));
    return {specs, cfg, std::move(state)};
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": malformed checkpoint header: " + e.what());
  }
}

}  // namespace fairgan::training
