// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_NN_SPECS_H_
#define FAIRGAN_NN_SPECS_H_

#include "fairgan/core/dataset.h"
#include "json.hpp"

namespace fairgan::nn {

// How the generator's outcome path sees the protected attribute.
//   kNone: the outcome is a function of z alone.
//   kClassEmbed: a learned class embedding is concatenated with z.
enum class OutcomeConditioning { kNone, kClassEmbed };

struct GeneratorSpec {
  int noise_dim = 128;
  int num_classes = 2;
  int base_channels = 64;
  ImageShape image_shape{3, 64, 64};
  int outcome_hidden_dim = 128;
  OutcomeConditioning outcome_conditioning = OutcomeConditioning::kClassEmbed;
  int class_embed_dim = 16;
  int num_up_blocks = 4;
  double bn_eps = 1e-5;
  double bn_momentum = 0.1;

  // Throws std::invalid_argument on a malformed spec.
  void Validate() const;
  // Spatial size fed to the first upsampling block.
  int InitialSize() const { return image_shape.height >> num_up_blocks; }
  // Channel width entering upsampling block `level` (level == num_up_blocks
  // is the width after the last block).
  int Width(int level) const;

  bool operator==(const GeneratorSpec&) const = default;
};

struct DiscriminatorSpec {
  int base_channels = 64;
  int num_classes = 2;
  int num_down_blocks = 4;
  int y_head_hidden_dim = 128;
  ImageShape image_shape{3, 64, 64};
  int n_power_iterations = 1;

  void Validate() const;
  // Output width of downsampling block `block`.
  int Width(int block) const { return base_channels << block; }
  // Dimension of the trunk features (last block width after sum pooling).
  int FeatureDim() const { return Width(num_down_blocks - 1); }

  bool operator==(const DiscriminatorSpec&) const = default;
};

void to_json(nlohmann::json& j, const GeneratorSpec& spec);
void from_json(const nlohmann::json& j, GeneratorSpec& spec);
void to_json(nlohmann::json& j, const DiscriminatorSpec& spec);
void from_json(const nlohmann::json& j, DiscriminatorSpec& spec);

}  // namespace fairgan::nn

namespace fairgan {
void to_json(nlohmann::json& j, const ImageShape& shape);
void from_json(const nlohmann::json& j, ImageShape& shape);
}  // namespace fairgan

#endif  // FAIRGAN_NN_SPECS_H_
