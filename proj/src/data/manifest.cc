// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include "fairgan/data/manifest.h"

#include <boost/tokenizer.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "fairgan/core/errors.h"

namespace fairgan::data {
namespace {

std::vector<std::string> SplitCsv(const std::string& line) {
  using Tokenizer = boost::tokenizer<boost::escaped_list_separator<char>>;
  std::vector<std::string> out;
  try {
    Tokenizer tok(line, boost::escaped_list_separator<char>('\\', ',', '"'));
    for (const auto& field : tok) out.push_back(field);
  } catch (const boost::escaped_list_error& e) {
    throw DataError(std::string("malformed CSV: ") + e.what());
  }
  return out;
}

int ParseBit(const std::string& text, const char* column) {
  if (text == "0") return 0;
  if (text == "1") return 1;
  throw DataError(std::string(column) + " must be 0 or 1, got '" + text + "'");
}

std::string Quote(const std::string& field) {
  if (field.find_first_of(",\"\\\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

void Manifest::Validate() const {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const std::string where = "manifest row " + std::to_string(i + 1) + " (" + r.image_path + ")";
    if (r.image_path.empty()) throw DataError(where + ": empty image_path");
    if (std::filesystem::path(r.image_path).is_absolute()) {
      throw DataError(where + ": image_path must be relative to the dataset root");
    }
    if (!seen.insert(r.image_path).second) throw DataError(where + ": duplicate image_path");
    if (r.c != 0 && r.c != 1) throw DataError(where + ": c must be 0 or 1");
    if (r.y && *r.y != 0 && *r.y != 1) throw DataError(where + ": y must be 0 or 1");
    if (r.y_soft && !r.y) throw DataError(where + ": y_soft without y");
    if (r.y_soft && !(std::abs(*r.y_soft) < 1.0f)) {
      throw DataError(where + ": y_soft outside (-1, 1)");
    }
  }
}

Manifest ParseManifest(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": empty manifest");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  const auto header = SplitCsv(line);
  const std::vector<std::string> expected = {"image_path", "c", "y", "y_soft"};
  if (header.size() < 2 || header.size() > expected.size() ||
      !std::equal(header.begin(), header.end(), expected.begin())) {
    throw DataError(source + ": header must be image_path,c[,y[,y_soft]], got '" + line + "'");
  }
  Manifest m;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    std::vector<std::string> f;
    try {
      f = SplitCsv(line);
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
    if (f.size() != header.size()) {
      throw DataError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                      std::to_string(f.size()));
    }
    ManifestRow row;
    row.image_path = f[0];
    try {
      row.c = ParseBit(f[1], "c");
      if (f.size() > 2 && !f[2].empty()) row.y = ParseBit(f[2], "y");
      if (f.size() > 3 && !f[3].empty()) {
        float v = 0;
        const auto [ptr, ec] = std::from_chars(f[3].data(), f[3].data() + f[3].size(), v);
        if (ec != std::errc() || ptr != f[3].data() + f[3].size()) {
          throw DataError("y_soft is not a number: '" + f[3] + "'");
        }
        row.y_soft = v;
      }
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
    m.rows.push_back(std::move(row));
  }
  m.Validate();
  return m;
}

Manifest ReadManifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open manifest");
  return ParseManifest(in, path);
}

void WriteManifest(std::ostream& out, const Manifest& manifest) {
  bool any_soft = false;
  for (const auto& r : manifest.rows) any_soft = any_soft || r.y_soft.has_value();
  out << (any_soft ? "image_path,c,y,y_soft\n" : "image_path,c,y\n");
  for (const auto& r : manifest.rows) {
    out << Quote(r.image_path) << ',' << r.c << ',';
    if (r.y) out << *r.y;
    if (any_soft) {
      out << ',';
      if (r.y_soft) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(*r.y_soft));
        out << buf;
      }
    }
    out << '\n';
  }
}

}  // namespace fairgan::data
