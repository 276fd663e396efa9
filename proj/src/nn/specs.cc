// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include "fairgan/nn/specs.h"

#include <stdexcept>
#include <string>

#include "fairgan/core/json_fields.h"

namespace fairgan {

void to_json(nlohmann::json& j, const ImageShape& shape) {
  j = nlohmann::json::array({shape.channels, shape.height, shape.width});
}

void from_json(const nlohmann::json& j, ImageShape& shape) {
  if (!j.is_array() || j.size() != 3) {
    throw std::invalid_argument("image_shape must be [channels, height, width]");
  }
  shape = {j[0].get<int>(), j[1].get<int>(), j[2].get<int>()};
}

}  // namespace fairgan

namespace fairgan::nn {
namespace {

void Check(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void GeneratorSpec::Validate() const {
  Check(noise_dim >= 1, "generator: noise_dim must be >= 1");
  Check(num_classes >= 2, "generator: num_classes must be >= 2");
  Check(base_channels >= 1, "generator: base_channels must be >= 1");
  Check(outcome_hidden_dim >= 1, "generator: outcome_hidden_dim must be >= 1");
  Check(class_embed_dim >= 1, "generator: class_embed_dim must be >= 1");
  Check(num_up_blocks >= 1, "generator: num_up_blocks must be >= 1");
  Check(image_shape.channels >= 1, "generator: image channels must be >= 1");
  Check(image_shape.height == image_shape.width, "generator: images must be square");
  Check(image_shape.height > 0 && image_shape.height % (1 << num_up_blocks) == 0,
        "generator: image size " + std::to_string(image_shape.height) +
            " not divisible by 2^" + std::to_string(num_up_blocks));
  Check(bn_eps > 0 && bn_momentum > 0 && bn_momentum <= 1,
        "generator: invalid batch-norm constants");
}

int GeneratorSpec::Width(int level) const {
  const int shift = std::max(0, num_up_blocks - 1 - level);
  return base_channels << shift;
}

void DiscriminatorSpec::Validate() const {
  Check(base_channels >= 1, "discriminator: base_channels must be >= 1");
  Check(num_classes >= 2, "discriminator: num_classes must be >= 2");
  Check(num_down_blocks >= 1, "discriminator: num_down_blocks must be >= 1");
  Check(y_head_hidden_dim >= 1, "discriminator: y_head_hidden_dim must be >= 1");
  Check(n_power_iterations >= 0, "discriminator: n_power_iterations must be >= 0");
  Check(image_shape.channels >= 1 && image_shape.height > 0 && image_shape.width > 0,
        "discriminator: invalid image_shape");
  Check(image_shape.height % (1 << num_down_blocks) == 0 &&
            image_shape.width % (1 << num_down_blocks) == 0,
        "discriminator: image size not divisible by 2^num_down_blocks");
}

void to_json(nlohmann::json& j, const GeneratorSpec& s) {
  j = {{"noise_dim", s.noise_dim},
       {"num_classes", s.num_classes},
       {"base_channels", s.base_channels},
       {"image_shape", s.image_shape},
       {"outcome_hidden_dim", s.outcome_hidden_dim},
       {"outcome_conditioning",
        s.outcome_conditioning == OutcomeConditioning::kNone ? "none" : "class_embed"},
       {"class_embed_dim", s.class_embed_dim},
       {"num_up_blocks", s.num_up_blocks},
       {"bn_eps", s.bn_eps},
       {"bn_momentum", s.bn_momentum}};
}

void from_json(const nlohmann::json& j, GeneratorSpec& s) {
  RejectUnknownKeys(j,
                {"noise_dim", "num_classes", "base_channels", "image_shape",
                 "outcome_hidden_dim", "outcome_conditioning", "class_embed_dim",
                 "num_up_blocks", "bn_eps", "bn_momentum"},
                "generator");
  ReadField(j, "noise_dim", s.noise_dim);
  ReadField(j, "num_classes", s.num_classes);
  ReadField(j, "base_channels", s.base_channels);
  ReadField(j, "image_shape", s.image_shape);
  ReadField(j, "outcome_hidden_dim", s.outcome_hidden_dim);
  if (j.contains("outcome_conditioning")) {
    const auto mode = j.at("outcome_conditioning").get<std::string>();
    if (mode == "none") {
      s.outcome_conditioning = OutcomeConditioning::kNone;
    } else if (mode == "class_embed") {
      s.outcome_conditioning = OutcomeConditioning::kClassEmbed;
    } else {
      throw std::invalid_argument("outcome_conditioning must be none|class_embed");
    }
  }
  ReadField(j, "class_embed_dim", s.class_embed_dim);
  ReadField(j, "num_up_blocks", s.num_up_blocks);
  ReadField(j, "bn_eps", s.bn_eps);
  ReadField(j, "bn_momentum", s.bn_momentum);
}

void to_json(nlohmann::json& j, const DiscriminatorSpec& s) {
  j = {{"base_channels", s.base_channels},
       {"num_classes", s.num_classes},
       {"num_down_blocks", s.num_down_blocks},
       {"y_head_hidden_dim", s.y_head_hidden_dim},
       {"image_shape", s.image_shape},
       {"n_power_iterations", s.n_power_iterations},
       {"feature_dim", s.FeatureDim()}};
}

void from_json(const nlohmann::json& j, DiscriminatorSpec& s) {
  RejectUnknownKeys(j,
                {"base_channels", "num_classes", "num_down_blocks", "y_head_hidden_dim",
                 "image_shape", "n_power_iterations", "feature_dim"},
                "discriminator");
  ReadField(j, "base_channels", s.base_channels);
  ReadField(j, "num_classes", s.num_classes);
  ReadField(j, "num_down_blocks", s.num_down_blocks);
  ReadField(j, "y_head_hidden_dim", s.y_head_hidden_dim);
  ReadField(j, "image_shape", s.image_shape);
  ReadField(j, "n_power_iterations", s.n_power_iterations);
  if (j.contains("feature_dim") && j.at("feature_dim").get<int>() != s.FeatureDim()) {
    throw std::invalid_argument(
        "discriminator: feature_dim " + std::to_string(j.at("feature_dim").get<int>()) +
        " does not match the trunk width " + std::to_string(s.FeatureDim()));
  }
}

}  // namespace fairgan::nn
