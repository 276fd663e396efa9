// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include "fairgan/evaluation/pipeline.h"

#include <set>

#include "fairgan/core/errors.h"

namespace fairgan::evaluation {

PipelineResult EvaluatePipeline(const AttributedDataset& original_train,
                                const AttributedDataset& original_test,
                                const std::vector<NamedDataset>& debiased,
                                const PipelineConfig& config,
                                const nn::Discriminator<float>* probe_features,
                                const std::function<void(const std::string&)>& on_progress) {
  if (config.seeds.empty()) throw ConfigError("evaluation needs at least one seed");
  std::vector<NamedDataset> sets = {{kOriginalName, &original_train}};
  sets.insert(sets.end(), debiased.begin(), debiased.end());
  std::set<std::string> names;
  for (const auto& s : sets) {
    if (!s.data) throw std::invalid_argument("evaluation: null dataset '" + s.name + "'");
    if (!names.insert(s.name).second) throw ConfigError("duplicate dataset name '" + s.name + "'");
    if (s.data->image_shape != original_test.image_shape) {
      throw DataError("dataset '" + s.name + "' has image_shape " +
                      s.data->image_shape.ToString() + ", test set has " +
                      original_test.image_shape.ToString());
    }
  }
  if (!original_test.outcome_labeled) throw DataError("test partition carries no outcomes");

  PipelineResult result;
  result.test_digest = DatasetDigest(original_test);
  result.test_size = original_test.size();
  for (const auto& set : sets) {
    DatasetEvaluation ev;
    ev.name = set.name;
    ev.train_digest = DatasetDigest(*set.data);
    ev.seeds = config.seeds;
    for (std::size_t k = 0; k < config.seeds.size(); ++k) {
      if (on_progress) {
        on_progress("evaluate " + set.name + ": classifier seed " +
                    std::to_string(config.seeds[k]));
      }
      auto clf = TrainOutcomeClassifier(*set.data, config.classifier, probe_features,
                                        config.seeds[k]);
      ev.per_seed.push_back(
          FairnessMetrics(ComputeGroupConfusion(clf, original_test, config.threshold)));
      if (k == 0) {
        for (int g = 0; g < 2; ++g) {
          try {
            ev.roc[g] = ComputeRoc(clf, original_test, g, config.threshold);
          } catch (const DataError& e) {
            // Left without points; the caller reports it as undefined.
            ev.roc[g] = RocCurve{g, {}, {}, config.threshold};
            if (on_progress) on_progress("evaluate " + set.name + ": " + e.what());
          }
        }
      }
    }
    ev.mean = Aggregate(ev.per_seed);
    if (config.eigen_grids) {
      for (int g = 0; g < 2; ++g)
        for (int o = 0; o < 2; ++o) ev.grids[g][o] = EigenGridForCell(*set.data, g, o);
    }
    result.datasets.push_back(std::move(ev));
  }
  if (DatasetDigest(original_test) != result.test_digest) {
    throw std::logic_error("evaluation modified the test partition");
  }
  return result;
}

}  // namespace fairgan::evaluation
