// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_CORE_DIGEST_H_
#define FAIRGAN_CORE_DIGEST_H_

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

namespace fairgan {

// Incremental SHA-256.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void Update(const void* data, std::size_t size);
  void Update(std::string_view text) { Update(text.data(), text.size()); }
  template <typename T>
  void UpdateValue(const T& value) {
    Update(&value, sizeof(T));
  }
  // Lower-case hex. The hasher must not be updated afterwards.
  std::string HexDigest();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::string Sha256Hex(std::string_view bytes);
std::string FileSha256Hex(const std::string& path);

}  // namespace fairgan

#endif  // FAIRGAN_CORE_DIGEST_H_
