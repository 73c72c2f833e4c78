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

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace lumasci {

enum class ColorSpace { Rgb, Hsv, YCbCr, Gray };

const char* to_string(ColorSpace space) noexcept;

/// Float image stored plane-by-plane: all of channel 0, then channel 1, ...
///
/// Value ranges depend on `space`: RGB and GRAY in [0, 1]; HSV stores hue in
/// [0, 1) and S, V in [0, 1]; YCbCr stores Y in [0, 1] and zero-centred
/// chroma in [-0.5, 0.5]. A two-channel image tagged HSV or YCbCr holds the
/// chroma planes of a luma/chroma split.
struct PlanarImage {
  int height = 0;
  int width = 0;
  int channels = 0;
  ColorSpace space = ColorSpace::Rgb;
  std::vector<float> data;

  PlanarImage() = default;
  PlanarImage(int h, int w, int c, ColorSpace s, float fill = 0.0f);

  std::size_t plane_size() const noexcept {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  }
  std::span<float> plane(int c);
  std::span<const float> plane(int c) const;

  float& at(int c, int y, int x) {
    return data[static_cast<std::size_t>(c) * plane_size() +
                static_cast<std::size_t>(y) * width + x];
  }
  float at(int c, int y, int x) const {
    return data[static_cast<std::size_t>(c) * plane_size() +
                static_cast<std::size_t>(y) * width + x];
  }

  bool same_size(const PlanarImage& other) const noexcept {
    return height == other.height && width == other.width;
  }
};

/// Decodes an 8-bit PNG (RGB, RGBA, gray, gray+alpha or palette) into an RGB
/// image with values integer/255. Gray is promoted to three equal planes and
/// alpha is dropped.
PlanarImage load_image(const std::filesystem::path& path);

/// Writes an 8-bit RGB PNG; values are clamped to [0, 1] and rounded half
/// away from zero.
void save_image(const PlanarImage& img, const std::filesystem::path& path);

/// round(clamp(v, 0, 1) * 255), half away from zero.
unsigned char quantize_unit(float v) noexcept;

/// Snaps every value to the nearest 8-bit level, as a save/load round trip
/// would.
PlanarImage quantize_8bit(const PlanarImage& img);

}  // namespace lumasci
