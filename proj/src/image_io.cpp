// Copyright 2026 The lumasci Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>
#include <string>

#include "error.hpp"
#include "image.hpp"

namespace lumasci {

const char* to_string(ColorSpace space) noexcept {
  switch (space) {
    case ColorSpace::Rgb: return "rgb";
    case ColorSpace::Hsv: return "hsv";
    case ColorSpace::YCbCr: return "ycbcr";
    case ColorSpace::Gray: return "gray";
  }
  return "unknown";
}

PlanarImage::PlanarImage(int h, int w, int c, ColorSpace s, float fill)
    : height(h), width(w), channels(c), space(s) {
  if (h < 0 || w < 0 || c < 0) {
    throw Error(ErrorCode::InvalidArgument, "negative image dimension");
  }
  data.assign(static_cast<std::size_t>(h) * w * c, fill);
}

std::span<float> PlanarImage::plane(int c) {
  return std::span<float>(data).subspan(c * plane_size(), plane_size());
}

std::span<const float> PlanarImage::plane(int c) const {
  return std::span<const float>(data).subspan(c * plane_size(), plane_size());
}

unsigned char quantize_unit(float v) noexcept {
  const double clamped = std::clamp(static_cast<double>(v), 0.0, 1.0);
  // std::round is half-away-from-zero.
  return static_cast<unsigned char>(std::round(clamped * 255.0));
}

PlanarImage quantize_8bit(const PlanarImage& img) {
  PlanarImage out = img;
  for (float& v : out.data) v = static_cast<float>(quantize_unit(v)) / 255.0f;
  return out;
}

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_error_handler(png_structp png, png_const_charp msg) {
  auto* buffer = static_cast<std::string*>(png_get_error_ptr(png));
  if (buffer) *buffer = msg ? msg : "libpng error";
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

// Kept out of the C++ frames that own destructors; libpng reports errors via
// longjmp back into this function only.
bool decode_png(std::FILE* file, std::string& err, png_uint_32& width,
                png_uint_32& height, std::vector<unsigned char>& rgb) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err,
                                           png_error_handler,
                                           png_warning_handler);
  if (!png) {
    err = "cannot allocate PNG reader";
    return false;
  }
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    err = "cannot allocate PNG info";
    return false;
  }
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_init_io(png, file);
  png_read_info(png, info);
  width = png_get_image_width(png, info);
  height = png_get_image_height(png, info);
  const int depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);
  if (depth == 16) {
    err = "16-bit PNG is not supported";
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(png);
  }
  png_set_strip_alpha(png);
  png_read_update_info(png, info);
  if (png_get_rowbytes(png, info) != static_cast<png_size_t>(width) * 3) {
    err = "unexpected PNG row layout";
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  rgb.resize(static_cast<std::size_t>(width) * height * 3);
  rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) {
    rows[y] = rgb.data() + static_cast<std::size_t>(y) * width * 3;
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

bool encode_png(std::FILE* file, std::string& err, png_uint_32 width,
                png_uint_32 height, std::vector<unsigned char>& rgb) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err,
                                            png_error_handler,
                                            png_warning_handler);
  if (!png) {
    err = "cannot allocate PNG writer";
    return false;
  }
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    err = "cannot allocate PNG info";
    return false;
  }
  std::vector<png_bytep> rows(height);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, file);
  png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (png_uint_32 y = 0; y < height; ++y) {
    rows[y] = rgb.data() + static_cast<std::size_t>(y) * width * 3;
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

}  // namespace

PlanarImage load_image(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::FileNotFound, "file not found: " + path.string());
  }
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) {
    throw Error(ErrorCode::FileNotFound, "cannot open: " + path.string());
  }
  unsigned char sig[8] = {};
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw Error(ErrorCode::DecodeError, "not a PNG file: " + path.string());
  }
  std::rewind(file.get());

  std::string err;
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  std::vector<unsigned char> rgb;
  if (!decode_png(file.get(), err, width, height, rgb)) {
    throw Error(ErrorCode::DecodeError, path.string() + ": " + err);
  }

  PlanarImage img(static_cast<int>(height), static_cast<int>(width), 3,
                  ColorSpace::Rgb);
  const std::size_t n = img.plane_size();
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) {
      img.data[c * n + i] = static_cast<float>(rgb[i * 3 + c]) / 255.0f;
    }
  }
  return img;
}

void save_image(const PlanarImage& img, const std::filesystem::path& path) {
  if (img.space != ColorSpace::Rgb || img.channels != 3) {
    throw Error(ErrorCode::WrongSpace,
                "save_image expects a 3-channel RGB image, got " +
                    std::string(to_string(img.space)));
  }
  const std::size_t n = img.plane_size();
  std::vector<unsigned char> rgb(n * 3);
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) rgb[i * 3 + c] = quantize_unit(img.data[c * n + i]);
  }

  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) {
    throw Error(ErrorCode::IoError, "cannot write: " + path.string());
  }
  std::string err;
  if (!encode_png(file.get(), err, static_cast<png_uint_32>(img.width),
                  static_cast<png_uint_32>(img.height), rgb)) {
    throw Error(ErrorCode::IoError, path.string() + ": " + err);
  }
  if (std::fflush(file.get()) != 0) {
    throw Error(ErrorCode::IoError, "write failed: " + path.string());
  }
}

}  // namespace lumasci
