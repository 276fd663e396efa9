// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_DATA_LOADER_H_
#define FAIRGAN_DATA_LOADER_H_

#include <string>

#include "fairgan/core/dataset.h"
#include "fairgan/data/manifest.h"

namespace fairgan::data {

// Decodes every manifest row under `root_dir` in manifest order. The result
// is outcome-labeled iff every row carries y; a mix of present and absent y
// is a DataError, as is any missing or corrupt file (the error names the row).
AttributedDataset LoadAttributedImages(const std::string& root_dir, const Manifest& manifest,
                                       const ImageShape& image_shape);

// Convenience: reads `<root_dir>/manifest.csv` first.
AttributedDataset LoadAttributedDirectory(const std::string& root_dir,
                                          const ImageShape& image_shape);

// Writes one 8-bit PNG per sample plus manifest.csv. Pixels are quantized, so
// loading the directory back yields QuantizePixels(dataset).
void WriteAttributedDirectory(const std::string& root_dir, const AttributedDataset& dataset);

// The dataset as it survives an 8-bit round trip.
AttributedDataset QuantizePixels(AttributedDataset dataset);

inline constexpr const char* kManifestName = "manifest.csv";

}  // namespace fairgan::data

#endif  // FAIRGAN_DATA_LOADER_H_
