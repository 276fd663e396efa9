// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include "fairgan/nn/archive.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "fairgan/core/errors.h"

namespace fairgan::nn {
namespace {

constexpr char kMagic[8] = {'F', 'G', 'A', 'N', 'A', 'R', 'C', 'H'};

template <typename U>
void PutLe(std::string& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff));
  }
}

class Reader {
 public:
  explicit Reader(std::string bytes) : bytes_(std::move(bytes)) {}

  template <typename U>
  U Get() {
    Need(sizeof(U));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(U);
    return static_cast<U>(v);
  }
  std::string GetBytes(std::size_t n) {
    Need(n);
    std::string out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

 private:
  void Need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw DataError("archive truncated");
  }
  std::string bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void WriteArchive(const std::string& path, const Archive& archive) {
  std::string out(kMagic, sizeof(kMagic));
  PutLe<std::uint32_t>(out, archive.format_version);
  const std::string header = archive.header.dump();
  PutLe<std::uint64_t>(out, header.size());
  out += header;
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(archive.tensors.size()));
  for (const auto& [name, tensor] : archive.tensors) {
    PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(tensor.rank()));
    for (int d : tensor.shape()) PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    for (float v : tensor.values()) PutLe<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot write " + tmp);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw DataError("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw DataError("cannot move " + tmp + " to " + path);
  }
}

Archive ReadArchive(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open archive " + path);
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  Reader r(std::move(bytes));
  if (r.GetBytes(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    throw DataError(path + " is not a parameter archive (bad magic)");
  }
  Archive a;
  a.format_version = r.Get<std::uint32_t>();
  if (a.format_version != kArchiveFormatVersion) {
    throw DataError("archive " + path + " has format version " +
                             std::to_string(a.format_version) + "; this build reads version " +
                             std::to_string(kArchiveFormatVersion));
  }
  const auto header_size = r.Get<std::uint64_t>();
  a.header = nlohmann::json::parse(r.GetBytes(header_size));
  const auto count = r.Get<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name = r.GetBytes(r.Get<std::uint32_t>());
    const auto rank = r.Get<std::uint32_t>();
    Shape shape(rank);
    for (auto& d : shape) d = static_cast<int>(r.Get<std::uint32_t>());
    std::vector<float> values(NumElements(shape));
    for (auto& v : values) v = std::bit_cast<float>(r.Get<std::uint32_t>());
    a.tensors[name] = Tensor<float>(std::move(shape), std::move(values));
  }
  return a;
}

void PutPrefixed(TensorMap<float>& dest, const std::string& prefix,
                 const TensorMap<float>& source) {
  for (const auto& [name, t] : source) dest[prefix + "/" + name] = t;
}

TensorMap<float> TakePrefixed(const TensorMap<float>& source, const std::string& prefix) {
  TensorMap<float> out;
  const std::string p = prefix + "/";
  for (const auto& [name, t] : source) {
    if (name.compare(0, p.size(), p) == 0) out[name.substr(p.size())] = t;
  }
  return out;
}

}  // namespace fairgan::nn
