// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_DATA_OUTCOME_H_
#define FAIRGAN_DATA_OUTCOME_H_

namespace fairgan::data {

// 1 when a non-negative event rate (e.g. offenses per match) is at or below
// the threshold, else 0. Negative or non-finite rates throw DataError.
int BinarizeOutcome(double rate, double threshold);

}  // namespace fairgan::data

#endif  // FAIRGAN_DATA_OUTCOME_H_
