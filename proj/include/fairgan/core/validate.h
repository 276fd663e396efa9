// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_CORE_VALIDATE_H_
#define FAIRGAN_CORE_VALIDATE_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fairgan/core/dataset.h"

namespace fairgan {

enum class InvariantKind {
  kPixelRange,
  kShapeMismatch,
  kAttributeRange,
  kOutcomeRange,
  kMissingOutcome,
  kSoftWithoutHard,
  kSoftRange,
  kNonFinite,
};

std::string ToString(InvariantKind kind);

struct Violation {
  // Absent for dataset-level violations.
  std::optional<std::size_t> sample_index;
  InvariantKind kind;
  std::string detail;
};

// Empty iff every dataset and sample invariant holds. At most one violation
// of each kind is reported per sample.
std::vector<Violation> ValidateDataset(const AttributedDataset& dataset);

}  // namespace fairgan

#endif  // FAIRGAN_CORE_VALIDATE_H_
