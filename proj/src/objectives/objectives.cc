// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include "fairgan/objectives/objectives.h"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "fairgan/core/errors.h"
#include "fairgan/nn/ops.h"

namespace fairgan::objectives {
namespace {

using nn::Var;

// Collects weighted terms and mirrors their values into a LossBreakdown.
template <typename T>
class Composer {
 public:
  Composer(nn::Tape<T>& tape, const ObjectiveOptions& options)
      : tape_(tape), options_(options) {}

  void Add(int index, Var term) {
    const double value = static_cast<double>(tape_.value(term)[0]);
    if (!std::isfinite(value)) {
      throw NumericError(std::string("non-finite loss component ") +
                               kComponentNames[static_cast<std::size_t>(index)]);
    }
    components_[static_cast<std::size_t>(index)] = value;
    terms_.push_back(
        nn::Scale(tape_, term, static_cast<T>(options_.weights[static_cast<std::size_t>(index)])));
  }

  ObjectiveValue Finish() {
    ObjectiveValue out;
    out.total = nn::AddScalars(tape_, std::span<const Var>(terms_));
    LossBreakdown& b = out.breakdown;
    b.l_sj_real = components_[0];
    b.l_sj_fake = components_[1];
    b.l_sx_real = components_[2];
    b.l_sx_fake = components_[3];
    b.l_c_real = components_[4];
    b.l_c_fake = components_[5];
    b.l_dp_real = components_[6];
    b.l_dp_fake = components_[7];
    b.total = b.WeightedSum(options_.weights);
    return out;
  }

 private:
  nn::Tape<T>& tape_;
  const ObjectiveOptions& options_;
  std::array<double, 8> components_{};
  std::vector<Var> terms_;
};

bool HasRows(const nn::Tape<auto>& tape, Var v) {
  return v.valid() && !tape.value(v).empty();
}

}  // namespace

std::array<double, 8> LossBreakdown::Components() const {
  return {l_sj_real, l_sj_fake, l_sx_real, l_sx_fake,
          l_c_real,  l_c_fake,  l_dp_real, l_dp_fake};
}

double LossBreakdown::WeightedSum(const std::array<double, 8>& weights) const {
  const auto c = Components();
  double sum = 0;
  for (std::size_t i = 0; i < c.size(); ++i) sum += weights[i] * c[i];
  return sum;
}

template <typename T>
ObjectiveValue DiscriminatorObjective(nn::Tape<T>& tape,
                                      const nn::DiscriminatorOutputs& real_labeled,
                                      const nn::DiscriminatorOutputs* real_unlabeled,
                                      const nn::DiscriminatorOutputs& fake,
                                      std::span<const int> c_labels,
                                      std::span<const int> fairness_head_labels,
                                      const ObjectiveOptions& options) {
  if (!HasRows(tape, real_labeled.s_joint)) {
    throw std::invalid_argument("discriminator objective: labeled real batch is empty");
  }
  const int n_lab = tape.value(real_labeled.s_joint).dim(0);
  const bool has_unl = real_unlabeled != nullptr && HasRows(tape, real_unlabeled->s_x);
  const int n_unl = has_unl ? tape.value(real_unlabeled->s_x).dim(0) : 0;
  if (static_cast<int>(c_labels.size()) != n_lab + n_unl) {
    throw std::invalid_argument("discriminator objective: c_labels must cover labeled and "
                                "unlabeled rows");
  }
  if (static_cast<int>(fairness_head_labels.size()) != n_lab) {
    throw std::invalid_argument("discriminator objective: fairness labels must cover the "
                                "labeled rows");
  }

  Var real_sx = real_labeled.s_x;
  Var real_cx = real_labeled.logits_c_given_x;
  if (has_unl) {
    const Var sx[] = {real_labeled.s_x, real_unlabeled->s_x};
    const Var cx[] = {real_labeled.logits_c_given_x, real_unlabeled->logits_c_given_x};
    real_sx = nn::ConcatRows(tape, std::span<const Var>(sx));
    real_cx = nn::ConcatRows(tape, std::span<const Var>(cx));
  }

  Composer<T> sum(tape, options);
  sum.Add(0, nn::HingeDiscriminator(tape, real_labeled.s_joint, Var{}));
  sum.Add(1, nn::HingeDiscriminator(tape, Var{}, fake.s_joint));
  sum.Add(2, nn::HingeDiscriminator(tape, real_sx, Var{}));
  sum.Add(3, nn::HingeDiscriminator(tape, Var{}, fake.s_x));
  sum.Add(4, nn::SoftmaxCrossEntropy(tape, real_cx, c_labels));
  sum.Add(6, nn::SoftmaxCrossEntropy(tape, real_labeled.logits_c_given_y, fairness_head_labels));
  return sum.Finish();
}

template <typename T>
ObjectiveValue GeneratorObjective(nn::Tape<T>& tape, const nn::DiscriminatorOutputs& fake,
                                  std::span<const int> c_labels, Var y_fake,
                                  FairnessObjective objective, const ObjectiveOptions& options) {
  Composer<T> sum(tape, options);
  sum.Add(1, nn::HingeGenerator(tape, fake.s_joint));
  sum.Add(3, nn::HingeGenerator(tape, fake.s_x));
  sum.Add(5, nn::SoftmaxCrossEntropy(tape, fake.logits_c_given_x, c_labels));
  const Var logits = fake.logits_c_given_y;
  switch (objective) {
    case FairnessObjective::kNone:
      break;
    case FairnessObjective::kDp: {
      const Var ce = nn::SoftmaxCrossEntropy<T>(tape, logits, c_labels, {},
                                                options.uniform_target);
      sum.Add(7, options.uniform_target ? ce : nn::Scale(tape, ce, T(-1)));
      break;
    }
    case FairnessObjective::kEo: {
      if (!y_fake.valid()) {
        throw std::invalid_argument("generator objective: EO needs y_fake");
      }
      const Var gate = nn::GateWeight(tape, y_fake, static_cast<T>(options.gate_magnitude));
      const Var ce =
          nn::WeightedCrossEntropy(tape, logits, c_labels, gate, options.uniform_target);
      sum.Add(7, options.uniform_target ? ce : nn::Scale(tape, ce, T(-1)));
      break;
    }
  }
  return sum.Finish();
}

template <typename T>
nn::DiscriminatorOutputs SliceOutputs(nn::Tape<T>& tape, const nn::DiscriminatorOutputs& out,
                                      int begin, int end) {
  nn::DiscriminatorOutputs s;
  s.s_joint = nn::SliceRows(tape, out.s_joint, begin, end);
  s.s_x = nn::SliceRows(tape, out.s_x, begin, end);
  s.logits_c_given_x = nn::SliceRows(tape, out.logits_c_given_x, begin, end);
  s.logits_c_given_y = nn::SliceRows(tape, out.logits_c_given_y, begin, end);
  if (out.phi.valid()) s.phi = nn::SliceRows(tape, out.phi, begin, end);
  return s;
}

std::string LossLogHeader() {
  std::string h = "step\tnet";
  for (const char* name : kComponentNames) h += std::string("\t") + name;
  return h + "\ttotal\tlr";
}

std::string LossLogRow(long long step, std::string_view net, const LossBreakdown& breakdown,
                       double lr) {
  std::string row = std::to_string(step) + "\t" + std::string(net);
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "\t%.9g", v);
    row += buf;
  };
  for (double v : breakdown.Components()) put(v);
  put(breakdown.total);
  put(lr);
  return row;
}

#define FAIRGAN_INSTANTIATE(T)                                                             \
  template ObjectiveValue DiscriminatorObjective<T>(                                       \
      nn::Tape<T>&, const nn::DiscriminatorOutputs&, const nn::DiscriminatorOutputs*,      \
      const nn::DiscriminatorOutputs&, std::span<const int>, std::span<const int>,         \
      const ObjectiveOptions&);                                                            \
  template ObjectiveValue GeneratorObjective<T>(nn::Tape<T>&, const nn::DiscriminatorOutputs&, \
                                                std::span<const int>, Var, FairnessObjective, \
                                                const ObjectiveOptions&);                  \
  template nn::DiscriminatorOutputs SliceOutputs<T>(nn::Tape<T>&,                          \
                                                    const nn::DiscriminatorOutputs&, int, int);

FAIRGAN_INSTANTIATE(float)
FAIRGAN_INSTANTIATE(double)
#undef FAIRGAN_INSTANTIATE

}  // namespace fairgan::objectives
