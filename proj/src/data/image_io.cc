// Copyright 2026 The FairGAN Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0.

#include "fairgan/data/image_io.h"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "fairgan/core/errors.h"

namespace fairgan::data {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void PngError(png_structp png, png_const_charp message) {
  auto* what = static_cast<std::string*>(png_get_error_ptr(png));
  *what = message;
  png_longjmp(png, 1);
}

void PngWarning(png_structp, png_const_charp) {}

}  // namespace

Image8 ReadPng(const std::string& path) {
  File file(std::fopen(path.c_str(), "rb"));
  if (!file) throw DataError(path + ": cannot open");
  png_byte sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw DataError(path + ": not a PNG file");
  }
  std::string error;
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, PngError, PngWarning);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw DataError(path + ": out of memory");
  }
  Image8 image;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError(path + ": corrupt PNG (" + error + ")");
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  const auto color = png_get_color_type(png, info);
  const auto depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);
  image.width = static_cast<int>(png_get_image_width(png, info));
  image.height = static_cast<int>(png_get_image_height(png, info));
  image.channels = png_get_channels(png, info);
  image.pixels.resize(static_cast<std::size_t>(image.width) * image.height * image.channels);
  rows.resize(image.height);
  for (int r = 0; r < image.height; ++r) {
    rows[r] = image.pixels.data() + static_cast<std::size_t>(r) * image.width * image.channels;
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  if (image.channels != 1 && image.channels != 3) {
    throw DataError(path + ": unsupported channel count " + std::to_string(image.channels));
  }
  return image;
}

void WritePng(const std::string& path, const Image8& image) {
  if (image.channels != 1 && image.channels != 3) {
    throw std::invalid_argument("WritePng: channels must be 1 or 3");
  }
  if (image.pixels.size() !=
      static_cast<std::size_t>(image.width) * image.height * image.channels) {
    throw std::invalid_argument("WritePng: pixel buffer does not match dimensions");
  }
  File file(std::fopen(path.c_str(), "wb"));
  if (!file) throw DataError(path + ": cannot open for writing");
  std::string error;
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, PngError, PngWarning);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw DataError(path + ": out of memory");
  }
  std::vector<png_const_bytep> rows(image.height);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw DataError(path + ": PNG encoding failed (" + error + ")");
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, image.width, image.height, 8,
               image.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int r = 0; r < image.height; ++r) {
    rows[r] = image.pixels.data() + static_cast<std::size_t>(r) * image.width * image.channels;
  }
  png_write_image(png, const_cast<png_bytepp>(rows.data()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

std::string EncodePgm(const Image8& image) {
  if (image.channels != 1) throw std::invalid_argument("EncodePgm: gray images only");
  std::string out = "P5\n" + std::to_string(image.width) + " " +
                    std::to_string(image.height) + "\n255\n";
  out.append(image.pixels.begin(), image.pixels.end());
  return out;
}

Image8 ReadPgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path + ": cannot open");
  std::string magic;
  int maxval = 0;
  Image8 image;
  in >> magic >> image.width >> image.height >> maxval;
  if (magic != "P5" || maxval != 255 || image.width <= 0 || image.height <= 0) {
    throw DataError(path + ": not an 8-bit binary PGM");
  }
  in.get();
  image.pixels.resize(static_cast<std::size_t>(image.width) * image.height);
  in.read(reinterpret_cast<char*>(image.pixels.data()),
          static_cast<std::streamsize>(image.pixels.size()));
  if (!in) throw DataError(path + ": truncated PGM");
  return image;
}

std::vector<float> ResizeBilinear(const std::vector<float>& chw, const ImageShape& from,
                                  int height, int width) {
  if (chw.size() != from.size()) throw std::invalid_argument("ResizeBilinear: size mismatch");
  if (height <= 0 || width <= 0) throw std::invalid_argument("ResizeBilinear: empty target");
  std::vector<float> out(static_cast<std::size_t>(from.channels) * height * width);
  auto axis = [](int dst, int n_dst, int n_src, int& i0, int& i1, double& frac) {
    double s = (dst + 0.5) * n_src / n_dst - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(n_src - 1));
    i0 = static_cast<int>(std::floor(s));
    i1 = std::min(i0 + 1, n_src - 1);
    frac = s - i0;
  };
  for (int c = 0; c < from.channels; ++c) {
    const float* src = chw.data() + static_cast<std::size_t>(c) * from.height * from.width;
    float* dst = out.data() + static_cast<std::size_t>(c) * height * width;
    for (int r = 0; r < height; ++r) {
      int r0, r1;
      double fr;
      axis(r, height, from.height, r0, r1, fr);
      for (int q = 0; q < width; ++q) {
        int q0, q1;
        double fq;
        axis(q, width, from.width, q0, q1, fq);
        const double top = src[r0 * from.width + q0] * (1 - fq) + src[r0 * from.width + q1] * fq;
        const double bot = src[r1 * from.width + q0] * (1 - fq) + src[r1 * from.width + q1] * fq;
        dst[r * width + q] = static_cast<float>(top * (1 - fr) + bot * fr);
      }
    }
  }
  return out;
}

std::vector<float> ToUnitChw(const Image8& image, const ImageShape& shape) {
  if (shape.channels != 1 && shape.channels != 3) {
    throw std::invalid_argument("image_shape channels must be 1 or 3");
  }
  const std::size_t plane = static_cast<std::size_t>(image.width) * image.height;
  ImageShape native{shape.channels, image.height, image.width};
  std::vector<float> chw(native.size());
  for (std::size_t p = 0; p < plane; ++p) {
    const std::uint8_t* px = image.pixels.data() + p * image.channels;
    if (shape.channels == image.channels) {
      for (int c = 0; c < shape.channels; ++c) chw[c * plane + p] = PixelToUnit(px[c]);
    } else if (shape.channels == 1) {
      // ITU-R BT.601 luma.
      const double luma = 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
      chw[p] = static_cast<float>(luma / 127.5 - 1.0);
    } else {
      for (int c = 0; c < 3; ++c) chw[c * plane + p] = PixelToUnit(px[0]);
    }
  }
  if (image.height == shape.height && image.width == shape.width) return chw;
  auto resized = ResizeBilinear(chw, native, shape.height, shape.width);
  for (float& v : resized) v = std::clamp(v, -1.0f, 1.0f);
  return resized;
}

Image8 FromUnitChw(const std::vector<float>& chw, const ImageShape& shape) {
  if (chw.size() != shape.size()) throw std::invalid_argument("FromUnitChw: size mismatch");
  Image8 image{shape.width, shape.height, shape.channels, {}};
  const std::size_t plane = static_cast<std::size_t>(shape.width) * shape.height;
  image.pixels.resize(chw.size());
  for (std::size_t p = 0; p < plane; ++p) {
    for (int c = 0; c < shape.channels; ++c) {
      image.pixels[p * shape.channels + c] = UnitToPixel(chw[c * plane + p]);
    }
  }
  return image;
}

}  // namespace fairgan::data
