// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include "fairgan/data/outcome.h"

#include <cmath>
#include <string>

#include "fairgan/core/errors.h"

namespace fairgan::data {

int BinarizeOutcome(double rate, double threshold) {
  if (!std::isfinite(rate) || rate < 0) {
    throw DataError("outcome rate must be finite and >= 0, got " + std::to_string(rate));
  }
  return rate <= threshold ? 1 : 0;
}

}  // namespace fairgan::data
