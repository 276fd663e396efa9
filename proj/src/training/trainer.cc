// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include "fairgan/training/trainer.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "fairgan/core/errors.h"
#include "fairgan/core/validate.h"
#include "fairgan/nn/ops.h"
#include "fairgan/training/checkpoint.h"

namespace fairgan::training {
namespace {

using nn::Tensor;
using nn::Var;

std::string RngToString(const std::mt19937_64& rng) {
  std::ostringstream out;
  out << rng;
  return out.str();
}

std::mt19937_64 RngFromString(const std::string& text) {
  std::mt19937_64 rng;
  std::istringstream in(text);
  in >> rng;
  if (!in) throw std::runtime_error("corrupt generator state");
  return rng;
}

Tensor<float> Noise(int n, int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor<float> z({n, dim});
  for (auto& v : z.values()) v = static_cast<float>(normal(rng));
  return z;
}

template <typename T>
bool AllFinite(const Tensor<T>& t) {
  return std::all_of(t.values().begin(), t.values().end(),
                     [](T v) { return std::isfinite(v); });
}

bool AllFinite(const nn::TensorMap<float>& m) {
  return std::all_of(m.begin(), m.end(), [](const auto& kv) { return AllFinite(kv.second); });
}

bool HeadsFinite(const nn::Tape<float>& tape, const nn::DiscriminatorOutputs& o) {
  return AllFinite(tape.value(o.s_joint)) && AllFinite(tape.value(o.s_x)) &&
         AllFinite(tape.value(o.logits_c_given_x)) && AllFinite(tape.value(o.logits_c_given_y));
}

// Rows of several [N_i, ...] tensors stacked along the leading dimension.
Tensor<float> StackRows(std::initializer_list<const Tensor<float>*> parts, nn::Shape tail) {
  int rows = 0;
  std::vector<float> data;
  for (const auto* p : parts) {
    if (p->empty()) continue;
    rows += p->dim(0);
    data.insert(data.end(), p->values().begin(), p->values().end());
  }
  tail.insert(tail.begin(), rows);
  return Tensor<float>(std::move(tail), std::move(data));
}

}  // namespace

EpochSampler::EpochSampler(std::size_t n, std::uint64_t seed) : order_(n), rng_(seed) {
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  Reshuffle();
}

void EpochSampler::Reshuffle() {
  std::shuffle(order_.begin(), order_.end(), rng_);
  cursor_ = 0;
}

std::vector<std::size_t> EpochSampler::Next(std::size_t count) {
  if (count > 0 && order_.empty()) throw std::logic_error("sampling from an empty pool");
  std::vector<std::size_t> out;
  out.reserve(count);
  while (out.size() < count) {
    if (cursor_ == order_.size()) {
      ++epoch_;
      Reshuffle();
    }
    out.push_back(order_[cursor_++]);
  }
  return out;
}

nlohmann::json EpochSampler::ToJson() const {
  return {{"order", order_}, {"cursor", cursor_}, {"epoch", epoch_}, {"rng", RngToString(rng_)}};
}

EpochSampler EpochSampler::FromJson(const nlohmann::json& j) {
  EpochSampler s;
  s.order_ = j.at("order").get<std::vector<std::size_t>>();
  s.cursor_ = j.at("cursor").get<std::size_t>();
  s.epoch_ = j.at("epoch").get<std::int64_t>();
  s.rng_ = RngFromString(j.at("rng").get<std::string>());
  if (s.cursor_ > s.order_.size()) throw std::runtime_error("corrupt sampler state");
  return s;
}

TrainState InitTrainState(const ModelSpecs& specs, const TrainConfig& cfg,
                          std::size_t n_labeled, std::size_t n_unlabeled) {
  specs.Validate();
  std::mt19937_64 seeds(cfg.seed);
  const std::uint64_t g_seed = seeds(), d_seed = seeds(), noise_seed = seeds(),
                      data_seed = seeds(), lab_seed = seeds(), unl_seed = seeds();
  TrainState state(nn::Generator<float>(specs.generator, g_seed),
                   nn::Discriminator<float>(specs.discriminator, d_seed));
  state.rng.seed(noise_seed);
  state.data_rng.seed(data_seed);
  state.labeled_sampler = EpochSampler(n_labeled, lab_seed);
  state.unlabeled_sampler = EpochSampler(n_unlabeled, unl_seed);
  return state;
}

bool StatesEqual(const TrainState& a, const TrainState& b) {
  return a.step == b.step && a.generator.params() == b.generator.params() &&
         a.generator.buffers() == b.generator.buffers() &&
         a.discriminator.params() == b.discriminator.params() &&
         a.discriminator.buffers() == b.discriminator.buffers() && a.g_adam == b.g_adam &&
         a.d_adam == b.d_adam && a.rng == b.rng && a.data_rng == b.data_rng &&
         a.labeled_sampler == b.labeled_sampler && a.unlabeled_sampler == b.unlabeled_sampler;
}

std::vector<float> SoftenAndPerturb(std::span<const int> y_hard, double magnitude,
                                    double noise_std, std::mt19937_64& rng) {
  if (!(magnitude > 0 && magnitude < 1)) {
    throw std::invalid_argument("soften: magnitude must lie in (0, 1)");
  }
  if (noise_std < 0) throw std::invalid_argument("soften: noise_std must be >= 0");
  std::normal_distribution<double> noise(0.0, noise_std > 0 ? noise_std : 1.0);
  std::vector<float> out;
  out.reserve(y_hard.size());
  for (int y : y_hard) {
    if (y != 0 && y != 1) throw std::invalid_argument("soften: y_hard must be 0 or 1");
    double v = (2.0 * y - 1.0) * magnitude;
    if (noise_std > 0) v += noise(rng);
    out.push_back(static_cast<float>(std::clamp(v, -0.999, 0.999)));
  }
  return out;
}

double LrAt(std::int64_t step, const TrainConfig& cfg) {
  if (step < 0 || step > cfg.total_steps) {
    throw std::invalid_argument("lr schedule: step " + std::to_string(step) +
                                " outside [0, " + std::to_string(cfg.total_steps) + "]");
  }
  if (cfg.total_steps == 0) return cfg.lr_init;
  return cfg.lr_init *
         (1.0 - static_cast<double>(step) / static_cast<double>(cfg.total_steps));
}

Batch MakeBatch(const AttributedDataset& data, std::span<const std::size_t> indices,
                bool labeled, const TrainConfig& cfg, std::mt19937_64& rng) {
  const auto& shape = data.image_shape;
  const int n = static_cast<int>(indices.size());
  Batch b;
  b.x = Tensor<float>({n, shape.channels, shape.height, shape.width});
  std::vector<int> y_hard;
  for (int i = 0; i < n; ++i) {
    const auto& s = data.samples.at(indices[static_cast<std::size_t>(i)]);
    std::copy(s.x.begin(), s.x.end(), b.x.data() + static_cast<std::size_t>(i) * shape.size());
    b.c.push_back(s.c);
    if (labeled) y_hard.push_back(s.y_hard.value());
  }
  if (labeled) {
    b.y_soft = Tensor<float>(
        {n}, SoftenAndPerturb(y_hard, cfg.soften_magnitude, cfg.y_noise_std, rng));
  }
  return b;
}

StepResult TrainStep(TrainState& state, const Batch& labeled, const Batch& unlabeled,
                     const TrainConfig& cfg) {
  const int n_lab = labeled.size();
  const int n_unl = unlabeled.size();
  if (n_lab == 0) throw std::invalid_argument("train step: labeled batch is empty");
  if (static_cast<int>(labeled.y_soft.size()) != n_lab) {
    throw std::invalid_argument("train step: labeled batch lacks softened outcomes");
  }
  StepResult result;
  result.lr = LrAt(state.step, cfg);
  const AdamHyper hyper{result.lr, cfg.beta1, cfg.beta2, cfg.adam_eps};
  const auto options = cfg.Objective();
  const auto& image = state.generator.spec().image_shape;
  const nn::Shape image_dims = {image.channels, image.height, image.width};
  const int noise_dim = state.generator.spec().noise_dim;

  std::vector<int> c_real = labeled.c;
  c_real.insert(c_real.end(), unlabeled.c.begin(), unlabeled.c.end());
  const Tensor<float> y_unl({n_unl}, 0.0f);  // unused by the losses

  TrainState next = state;
  auto abort = [&](const std::string& why) {
    result.aborted = true;
    result.diagnostic = why;
    return result;
  };
  try {
    for (int k = 0; k < cfg.d_steps_per_g_step; ++k) {
      const Tensor<float> z = Noise(n_lab, noise_dim, next.rng);
      const auto [x_fake, y_fake] =
          next.generator.Sample(labeled.c, z, {nn::Mode::kTrain, false});
      nn::Tape<float> tape;
      nn::Binding<float> bind(tape, next.discriminator.params(), true);
      const Var x = tape.Constant(StackRows({&labeled.x, &unlabeled.x, &x_fake}, image_dims));
      const Var y = tape.Constant(StackRows({&labeled.y_soft, &y_unl, &y_fake}, {}));
      const auto out = next.discriminator.Forward(tape, bind, x, y, {nn::Mode::kTrain, true});
      if (!HeadsFinite(tape, out)) return abort("non-finite discriminator output (D step)");
      const auto real_lab = objectives::SliceOutputs(tape, out, 0, n_lab);
      const auto real_unl = objectives::SliceOutputs(tape, out, n_lab, n_lab + n_unl);
      const auto fake = objectives::SliceOutputs(tape, out, n_lab + n_unl, 2 * n_lab + n_unl);
      const auto obj = objectives::DiscriminatorObjective(
          tape, real_lab, n_unl > 0 ? &real_unl : nullptr, fake, c_real, labeled.c, options);
      tape.Backward(obj.total);
      const auto grads = bind.Gradients(tape);
      if (!AllFinite(grads)) return abort("non-finite discriminator gradient");
      AdamUpdate(next.discriminator.params(), grads, next.d_adam, hyper);
      result.d_loss = obj.breakdown;
    }

    const Tensor<float> z = Noise(n_lab, noise_dim, next.rng);
    nn::Tape<float> tape;
    nn::Binding<float> g_bind(tape, next.generator.params(), true);
    nn::Binding<float> d_bind(tape, next.discriminator.params(), false);
    const auto fake = next.generator.Forward(tape, g_bind, labeled.c, tape.Constant(z),
                                             {nn::Mode::kTrain, true});
    const auto out = next.discriminator.Forward(tape, d_bind, fake.x_fake, fake.y_fake,
                                                {nn::Mode::kTrain, true});
    if (!HeadsFinite(tape, out)) return abort("non-finite discriminator output (G step)");
    const auto obj = objectives::GeneratorObjective(tape, out, labeled.c, fake.y_fake,
                                                    cfg.objective, options);
    tape.Backward(obj.total);
    const auto grads = g_bind.Gradients(tape);
    if (!AllFinite(grads)) return abort("non-finite generator gradient");
    AdamUpdate(next.generator.params(), grads, next.g_adam, hyper);
    result.g_loss = obj.breakdown;
  } catch (const NumericError& e) {
    return abort(e.what());
  }
  ++next.step;
  state = std::move(next);
  return result;
}

BatchSplit SplitBatch(const TrainConfig& cfg, bool has_unlabeled) {
  if (!has_unlabeled || cfg.unlabeled_mix_fraction <= 0) return {cfg.batch_size, 0};
  const int n_unl = static_cast<int>(std::lround(cfg.unlabeled_mix_fraction * cfg.batch_size));
  // The joint and fairness terms need at least one labeled sample.
  const int clamped = std::min(n_unl, cfg.batch_size - 1);
  return {cfg.batch_size - clamped, clamped};
}

TrainResult Train(TrainState& state, const ModelSpecs& specs, const TrainConfig& cfg,
                  const AttributedDataset& labeled, const AttributedDataset* unlabeled,
                  const TrainOutputs& outputs) {
  cfg.Validate();
  specs.Validate();
  if (labeled.empty()) throw DataError("training set is empty");
  if (!labeled.outcome_labeled) throw DataError("training set carries no outcome labels");
  if (const auto v = ValidateDataset(labeled); !v.empty()) {
    throw DataError("training set violates " + ToString(v.front().kind) + ": " +
                    v.front().detail);
  }
  if (!(labeled.image_shape == specs.generator.image_shape)) {
    throw DataError("training images are " + labeled.image_shape.ToString() +
                    " but the model expects " + specs.generator.image_shape.ToString());
  }
  const bool has_unl = unlabeled != nullptr && !unlabeled->empty();
  if (has_unl) {
    if (!(unlabeled->image_shape == labeled.image_shape)) {
      throw DataError("unlabeled images are " + unlabeled->image_shape.ToString() +
                      ", labeled are " + labeled.image_shape.ToString());
    }
    if (const auto v = ValidateDataset(*unlabeled); !v.empty()) {
      throw DataError("unlabeled set violates " + ToString(v.front().kind));
    }
  }
  if (state.labeled_sampler.size() != labeled.size()) {
    throw std::invalid_argument("train state was initialised for a different training set");
  }
  const BatchSplit split = SplitBatch(cfg, has_unl);
  if (split.unlabeled > 0 && state.unlabeled_sampler.size() != unlabeled->size()) {
    throw std::invalid_argument("train state was initialised for a different unlabeled set");
  }
  if (!has_unl && cfg.unlabeled_mix_fraction > 0) {
    spdlog::warn("unlabeled_mix_fraction {} ignored: no unlabeled data",
                 cfg.unlabeled_mix_fraction);
  }

  TrainResult result;
  std::ofstream log;
  auto checkpoint = [&] {
    if (outputs.run_dir.empty()) return;
    const auto path =
        (std::filesystem::path(outputs.run_dir) / CheckpointName(state.step)).string();
    SaveCheckpoint(path, state, specs, cfg);
    result.checkpoints.push_back(path);
  };
  if (!outputs.run_dir.empty()) {
    std::filesystem::create_directories(outputs.run_dir);
    result.loss_log = (std::filesystem::path(outputs.run_dir) / "loss_log.tsv").string();
    const bool fresh = state.step == 0 || !std::filesystem::exists(result.loss_log);
    log.open(result.loss_log, fresh ? std::ios::trunc : std::ios::app);
    if (!log) throw std::runtime_error("cannot open " + result.loss_log);
    if (fresh) log << objectives::LossLogHeader() << '\n';
  }
  if (state.step == 0) checkpoint();

  int consecutive = 0;
  while (state.step < cfg.total_steps) {
    const auto lab_idx = state.labeled_sampler.Next(static_cast<std::size_t>(split.labeled));
    const Batch lab = MakeBatch(labeled, lab_idx, true, cfg, state.data_rng);
    Batch unl;
    if (split.unlabeled > 0) {
      const auto idx = state.unlabeled_sampler.Next(static_cast<std::size_t>(split.unlabeled));
      unl = MakeBatch(*unlabeled, idx, false, cfg, state.data_rng);
    }
    const std::int64_t step = state.step;
    const StepResult r = TrainStep(state, lab, unl, cfg);
    if (outputs.on_step) outputs.on_step(state, r);
    if (r.aborted) {
      ++result.aborted_steps;
      spdlog::warn("step {} aborted: {}", step, r.diagnostic);
      if (++consecutive >= cfg.max_consecutive_aborts) {
        throw NumericError("training diverged: " + std::to_string(consecutive) +
                           " consecutive non-finite steps at step " + std::to_string(step));
      }
      continue;
    }
    consecutive = 0;
    if (log.is_open()) {
      log << objectives::LossLogRow(step, "D", r.d_loss, r.lr) << '\n'
          << objectives::LossLogRow(step, "G", r.g_loss, r.lr) << '\n';
    }
    const bool periodic = cfg.checkpoint_every > 0 && state.step % cfg.checkpoint_every == 0;
    if (periodic || state.step == cfg.total_steps) checkpoint();
  }
  if (log.is_open()) log.flush();
  return result;
}

AttributedDataset GenerateDebiasedDataset(nn::Generator<float>& generator, std::int64_t n,
                                          double class_marginal, std::uint64_t seed,
                                          double y_threshold) {
  if (n <= 0) throw std::invalid_argument("generate: n must be positive");
  if (!(class_marginal >= 0 && class_marginal <= 1)) {
    throw std::invalid_argument("generate: class_marginal must lie in [0, 1]");
  }
  constexpr std::int64_t kBatch = 64;
  const auto& spec = generator.spec();
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(class_marginal);
  AttributedDataset out;
  out.image_shape = spec.image_shape;
  out.outcome_labeled = true;
  // tanh can round to exactly +-1 in float; keep y_soft strictly inside.
  const float edge = std::nextafter(1.0f, 0.0f);
  for (std::int64_t begin = 0; begin < n; begin += kBatch) {
    const int count = static_cast<int>(std::min(kBatch, n - begin));
    std::vector<int> classes(static_cast<std::size_t>(count));
    for (auto& c : classes) c = coin(rng) ? 1 : 0;
    const Tensor<float> z = Noise(count, spec.noise_dim, rng);
    const auto [x, y] = generator.Sample(classes, z, {nn::Mode::kEval, false});
    const std::size_t pixels = spec.image_shape.size();
    for (int i = 0; i < count; ++i) {
      AttributedSample s;
      const float* px = x.data() + static_cast<std::size_t>(i) * pixels;
      s.x.assign(px, px + pixels);
      for (auto& v : s.x) v = std::clamp(v, -1.0f, 1.0f);
      s.c = classes[static_cast<std::size_t>(i)];
      const float yv = y[static_cast<std::size_t>(i)];
      s.y_hard = yv > y_threshold ? 1 : 0;
      s.y_soft = std::clamp(yv, -edge, edge);
      out.samples.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace fairgan::training
