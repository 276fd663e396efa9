// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_NN_ARCHIVE_H_
#define FAIRGAN_NN_ARCHIVE_H_

#include <cstdint>
#include <string>

#include "fairgan/nn/module.h"
#include "json.hpp"

namespace fairgan::nn {

inline constexpr std::uint32_t kArchiveFormatVersion = 1;

// Parameter archive: a JSON header plus named float32 arrays.
//
// Layout (all integers little-endian):
//   "FGANARCH"              8-byte magic
//   u32 format_version
//   u64 header_size, header bytes (UTF-8 JSON)
//   u32 tensor_count
//   per tensor: u32 name_size, name, u32 rank, u32 dims[rank],
//               float32 values[prod(dims)]
struct Archive {
  std::uint32_t format_version = kArchiveFormatVersion;
  nlohmann::json header = nlohmann::json::object();
  TensorMap<float> tensors;
};

void WriteArchive(const std::string& path, const Archive& archive);

// Throws std::runtime_error on I/O failure, bad magic, truncation, or a
// format version other than kArchiveFormatVersion.
Archive ReadArchive(const std::string& path);

// Adds every entry of `source` to `dest` under "<prefix>/<name>".
void PutPrefixed(TensorMap<float>& dest, const std::string& prefix,
                 const TensorMap<float>& source);
// Entries of `source` under "<prefix>/", with the prefix stripped.
TensorMap<float> TakePrefixed(const TensorMap<float>& source, const std::string& prefix);

}  // namespace fairgan::nn

#endif  // FAIRGAN_NN_ARCHIVE_H_
