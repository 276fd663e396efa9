// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_CORE_ERRORS_H_
#define FAIRGAN_CORE_ERRORS_H_

#include <stdexcept>

namespace fairgan {

// Malformed or inconsistent configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input data that is missing, undecodable or violates dataset invariants.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite losses or gradients, or metrics that are undefined.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fairgan

#endif  // FAIRGAN_CORE_ERRORS_H_
