// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_DATA_IMAGE_IO_H_
#define FAIRGAN_DATA_IMAGE_IO_H_

#include <cstdint>
#include <string>
#include <vector>

#include "fairgan/core/dataset.h"

namespace fairgan::data {

// 8-bit image with interleaved channels (HWC), 1 = gray, 3 = RGB.
struct Image8 {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> pixels;

  bool operator==(const Image8&) const = default;
};

// Decodes any PNG to 8-bit gray or RGB. Alpha is dropped, 16-bit samples are
// reduced, palettes expanded. Throws DataError on unreadable files.
Image8 ReadPng(const std::string& path);
void WritePng(const std::string& path, const Image8& image);

// Binary PGM (P5), 8-bit gray only.
std::string EncodePgm(const Image8& image);
Image8 ReadPgm(const std::string& path);

// CHW floats in [-1, 1] for `shape`. Converts channel count (luma for RGB to
// gray, replication for gray to RGB) and resizes bilinearly when needed.
std::vector<float> ToUnitChw(const Image8& image, const ImageShape& shape);
Image8 FromUnitChw(const std::vector<float>& chw, const ImageShape& shape);

// Bilinear resampling with half-pixel centers and edge clamping, per channel.
std::vector<float> ResizeBilinear(const std::vector<float>& chw, const ImageShape& from,
                                  int height, int width);

}  // namespace fairgan::data

#endif  // FAIRGAN_DATA_IMAGE_IO_H_
