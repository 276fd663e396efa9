// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#ifndef FAIRGAN_CORE_JSON_FIELDS_H_
#define FAIRGAN_CORE_JSON_FIELDS_H_

#include <set>
#include <string>

#include "fairgan/core/errors.h"
#include "json.hpp"

namespace fairgan {

// Reads an optional field, leaving `out` at its default when absent. Type
// mismatches become ConfigError naming the key.
template <typename V>
void ReadField(const nlohmann::json& j, const char* key, V& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<V>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("'") + key + "': " + e.what());
  }
}

inline void RejectUnknownKeys(const nlohmann::json& j, const std::set<std::string>& known,
                              const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

}  // namespace fairgan

#endif  // FAIRGAN_CORE_JSON_FIELDS_H_
