// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include "fairgan/data/loader.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fairgan/core/errors.h"
#include "fairgan/core/validate.h"
#include "fairgan/data/image_io.h"

namespace fairgan::data {

AttributedDataset LoadAttributedImages(const std::string& root_dir, const Manifest& manifest,
                                       const ImageShape& image_shape) {
  manifest.Validate();
  if (image_shape.channels != 1 && image_shape.channels != 3) {
    throw DataError("image_shape channels must be 1 or 3, got " + image_shape.ToString());
  }
  if (image_shape.height <= 0 || image_shape.width <= 0) {
    throw DataError("invalid image_shape " + image_shape.ToString());
  }
  std::size_t with_y = 0;
  for (const auto& r : manifest.rows) with_y += r.y.has_value();
  if (with_y != 0 && with_y != manifest.rows.size()) {
    throw DataError("manifest mixes rows with and without y (" + std::to_string(with_y) +
                    " of " + std::to_string(manifest.rows.size()) +
                    " labeled); split labeled and unlabeled pools into separate manifests");
  }
  AttributedDataset out;
  out.image_shape = image_shape;
  out.outcome_labeled = with_y == manifest.rows.size();
  out.samples.reserve(manifest.rows.size());
  const std::filesystem::path root(root_dir);
  for (std::size_t i = 0; i < manifest.rows.size(); ++i) {
    const auto& r = manifest.rows[i];
    AttributedSample s;
    try {
      s.x = ToUnitChw(ReadPng((root / r.image_path).string()), image_shape);
    } catch (const std::exception& e) {
      throw DataError("manifest row " + std::to_string(i + 1) + " (" + r.image_path +
                      "): " + e.what());
    }
    s.c = r.c;
    s.y_hard = r.y;
    s.y_soft = r.y_soft;
    out.samples.push_back(std::move(s));
  }
  const auto violations = ValidateDataset(out);
  if (!violations.empty()) {
    const auto& v = violations.front();
    throw DataError("loaded dataset violates invariants: " + ToString(v.kind) + " " + v.detail);
  }
  return out;
}

AttributedDataset LoadAttributedDirectory(const std::string& root_dir,
                                          const ImageShape& image_shape) {
  const auto manifest =
      ReadManifest((std::filesystem::path(root_dir) / kManifestName).string());
  return LoadAttributedImages(root_dir, manifest, image_shape);
}

void WriteAttributedDirectory(const std::string& root_dir, const AttributedDataset& dataset) {
  const auto violations = ValidateDataset(dataset);
  if (!violations.empty()) {
    throw DataError("refusing to write invalid dataset: " + ToString(violations.front().kind));
  }
  const std::filesystem::path root(root_dir);
  std::filesystem::create_directories(root / "images");
  Manifest manifest;
  char name[32];
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& s = dataset.samples[i];
    std::snprintf(name, sizeof name, "images/%08zu.png", i);
    WritePng((root / name).string(), FromUnitChw(s.x, dataset.image_shape));
    manifest.rows.push_back({name, s.c, s.y_hard, s.y_soft});
  }
  const auto path = root / kManifestName;
  std::ofstream out(path);
  WriteManifest(out, manifest);
  if (!out) throw DataError(path.string() + ": write failed");
}

AttributedDataset QuantizePixels(AttributedDataset dataset) {
  for (auto& s : dataset.samples) {
    for (float& v : s.x) v = PixelToUnit(UnitToPixel(v));
  }
  return dataset;
}

}  // namespace fairgan::data
