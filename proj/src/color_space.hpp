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

#include <cstdint>
#include <vector>

#include "image.hpp"

namespace lumasci {

/// Luminance plane plus the two untouched chroma planes of one color space.
struct LumaChromaPair {
  PlanarImage luma;    // GRAY, 1 channel: V (HSV) or Y (YCbCr)
  PlanarImage chroma;  // 2 channels tagged with the source space: H,S or Cb,Cr
};

/// RGB result of an inverse transform that may leave the gamut.
struct GamutResult {
  PlanarImage rgb;
  bool out_of_gamut = false;            // any value moved by more than 1e-6
  std::vector<std::uint8_t> clamped;    // per pixel, 1 where clamping bit
};

// Pixel kernels, exposed for tests and for the pipeline's re-extraction.
struct Hsv {
  double h, s, v;
};
struct YCbCr {
  double y, cb, cr;
};
struct Rgb {
  double r, g, b;
};

inline constexpr double kLumaR = 0.299;
inline constexpr double kLumaG = 0.587;
inline constexpr double kLumaB = 0.114;
inline constexpr double kCbScale = 1.772;  // 2 * (1 - kLumaB)
inline constexpr double kCrScale = 1.402;  // 2 * (1 - kLumaR)

Hsv rgb_to_hsv(Rgb p) noexcept;
Rgb hsv_to_rgb(Hsv p) noexcept;
YCbCr rgb_to_ycbcr(Rgb p) noexcept;
Rgb ycbcr_to_rgb(YCbCr p) noexcept;  // unclamped

PlanarImage rgb_to_hsv(const PlanarImage& img);
PlanarImage hsv_to_rgb(const PlanarImage& img);
PlanarImage rgb_to_ycbcr(const PlanarImage& img);
GamutResult ycbcr_to_rgb(const PlanarImage& img);

/// `space` must be Hsv or YCbCr.
LumaChromaPair split_luma(const PlanarImage& rgb, ColorSpace space);

/// Reassembles the tagged space and converts to RGB. The HSV path never
/// leaves the gamut; the YCbCr path clamps and flags.
GamutResult merge_luma(const LumaChromaPair& pair);

/// The luminance plane alone (V or Y), without building the chroma planes.
PlanarImage extract_luma(const PlanarImage& rgb, ColorSpace space);

}  // namespace lumasci
