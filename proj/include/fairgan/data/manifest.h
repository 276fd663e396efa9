// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_DATA_MANIFEST_H_
#define FAIRGAN_DATA_MANIFEST_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fairgan::data {

struct ManifestRow {
  std::string image_path;  // relative to the dataset root
  int c = 0;
  std::optional<int> y;
  // Only present in generated datasets; optional trailing `y_soft` column.
  std::optional<float> y_soft;

  bool operator==(const ManifestRow&) const = default;
};

// CSV with header `image_path,c[,y[,y_soft]]`. Empty y cells mean absent.
struct Manifest {
  std::vector<ManifestRow> rows;

  // Throws DataError on duplicate paths, out-of-range attributes, soft
  // outcomes without hard ones, or absolute paths.
  void Validate() const;
  bool operator==(const Manifest&) const = default;
};

Manifest ParseManifest(std::istream& in, const std::string& source = "manifest");
Manifest ReadManifest(const std::string& path);
void WriteManifest(std::ostream& out, const Manifest& manifest);

}  // namespace fairgan::data

#endif  // FAIRGAN_DATA_MANIFEST_H_
