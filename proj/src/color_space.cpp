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

#include "color_space.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"

namespace lumasci {

namespace {

void require_space(const PlanarImage& img, ColorSpace space, int channels,
                   const char* op) {
  if (img.space != space || img.channels != channels) {
    throw Error(ErrorCode::WrongSpace,
                std::string(op) + " expects " + to_string(space) + " input, got " +
                    to_string(img.space) + " with " +
                    std::to_string(img.channels) + " channels");
  }
}

}  // namespace

Hsv rgb_to_hsv(Rgb p) noexcept {
  const double v = std::max({p.r, p.g, p.b});
  const double mn = std::min({p.r, p.g, p.b});
  const double delta = v - mn;
  Hsv out{0.0, 0.0, v};
  if (v <= 0.0 || delta <= 0.0) return out;
  out.s = delta / v;
  double h;
  if (v == p.r) {
    h = (p.g - p.b) / delta;
    if (h < 0.0) h += 6.0;
  } else if (v == p.g) {
    h = (p.b - p.r) / delta + 2.0;
  } else {
    h = (p.r - p.g) / delta + 4.0;
  }
  h /= 6.0;
  // A tiny negative sector value can round up to exactly 1.
  out.h = h >= 1.0 ? 0.0 : h;
  return out;
}

Rgb hsv_to_rgb(Hsv p) noexcept {
  const double v = p.v;
  if (p.s <= 0.0) return {v, v, v};
  double h6 = p.h * 6.0;
  if (h6 >= 6.0 || h6 < 0.0) h6 = 0.0;
  const int sector = static_cast<int>(h6);
  const double f = h6 - sector;
  const double a = v * (1.0 - p.s);
  const double b = v * (1.0 - p.s * f);
  const double c = v * (1.0 - p.s * (1.0 - f));
  switch (sector) {
    case 0: return {v, c, a};
    case 1: return {b, v, a};
    case 2: return {a, v, c};
    case 3: return {a, b, v};
    case 4: return {c, a, v};
    default: return {v, a, b};
  }
}

YCbCr rgb_to_ycbcr(Rgb p) noexcept {
  const double y = kLumaR * p.r + kLumaG * p.g + kLumaB * p.b;
  return {y, (p.b - y) / kCbScale, (p.r - y) / kCrScale};
}

Rgb ycbcr_to_rgb(YCbCr p) noexcept {
  const double r = p.y + kCrScale * p.cr;
  const double b = p.y + kCbScale * p.cb;
  const double g = (p.y - kLumaR * r - kLumaB * b) / kLumaG;
  return {r, g, b};
}

PlanarImage rgb_to_hsv(const PlanarImage& img) {
  require_space(img, ColorSpace::Rgb, 3, "rgb_to_hsv");
  PlanarImage out(img.height, img.width, 3, ColorSpace::Hsv);
  const std::size_t n = img.plane_size();
  for (std::size_t i = 0; i < n; ++i) {
    const Hsv hsv = rgb_to_hsv(Rgb{img.data[i], img.data[n + i], img.data[2 * n + i]});
    out.data[i] = static_cast<float>(hsv.h);
    // float rounding can push a hue just below 1 up to 1.0f
    if (out.data[i] >= 1.0f) out.data[i] = 0.0f;
    out.data[n + i] = static_cast<float>(hsv.s);
    out.data[2 * n + i] = static_cast<float>(hsv.v);
  }
  return out;
}

PlanarImage hsv_to_rgb(const PlanarImage& img) {
  require_space(img, ColorSpace::Hsv, 3, "hsv_to_rgb");
  PlanarImage out(img.height, img.width, 3, ColorSpace::Rgb);
  const std::size_t n = img.plane_size();
  for (std::size_t i = 0; i < n; ++i) {
    const Rgb rgb = hsv_to_rgb(Hsv{img.data[i], img.data[n + i], img.data[2 * n + i]});
    out.data[i] = static_cast<float>(std::clamp(rgb.r, 0.0, 1.0));
    out.data[n + i] = static_cast<float>(std::clamp(rgb.g, 0.0, 1.0));
    out.data[2 * n + i] = static_cast<float>(std::clamp(rgb.b, 0.0, 1.0));
  }
  return out;
}

PlanarImage rgb_to_ycbcr(const PlanarImage& img) {
  require_space(img, ColorSpace::Rgb, 3, "rgb_to_ycbcr");
  PlanarImage out(img.height, img.width, 3, ColorSpace::YCbCr);
  const std::size_t n = img.plane_size();
  for (std::size_t i = 0; i < n; ++i) {
    const YCbCr ycc = rgb_to_ycbcr(Rgb{img.data[i], img.data[n + i], img.data[2 * n + i]});
    out.data[i] = static_cast<float>(ycc.y);
    out.data[n + i] = static_cast<float>(ycc.cb);
    out.data[2 * n + i] = static_cast<float>(ycc.cr);
  }
  return out;
}

GamutResult ycbcr_to_rgb(const PlanarImage& img) {
  require_space(img, ColorSpace::YCbCr, 3, "ycbcr_to_rgb");
  GamutResult result;
  result.rgb = PlanarImage(img.height, img.width, 3, ColorSpace::Rgb);
  const std::size_t n = img.plane_size();
  result.clamped.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const Rgb rgb = ycbcr_to_rgb(YCbCr{img.data[i], img.data[n + i], img.data[2 * n + i]});
    const double raw[3] = {rgb.r, rgb.g, rgb.b};
    for (int c = 0; c < 3; ++c) {
      const double v = std::clamp(raw[c], 0.0, 1.0);
      if (std::abs(v - raw[c]) > 1e-6) {
        result.clamped[i] = 1;
        result.out_of_gamut = true;
      }
      result.rgb.data[c * n + i] = static_cast<float>(v);
    }
  }
  return result;
}

LumaChromaPair split_luma(const PlanarImage& rgb, ColorSpace space) {
  PlanarImage full;
  if (space == ColorSpace::Hsv) {
    full = rgb_to_hsv(rgb);
  } else if (space == ColorSpace::YCbCr) {
    full = rgb_to_ycbcr(rgb);
  } else {
    throw Error(ErrorCode::WrongSpace,
                std::string("split_luma supports hsv and ycbcr, not ") + to_string(space));
  }
  const std::size_t n = full.plane_size();
  LumaChromaPair pair;
  pair.luma = PlanarImage(full.height, full.width, 1, ColorSpace::Gray);
  pair.chroma = PlanarImage(full.height, full.width, 2, space);
  if (space == ColorSpace::Hsv) {
    // H, S are planes 0-1 and V is plane 2.
    std::copy_n(full.data.begin() + 2 * n, n, pair.luma.data.begin());
    std::copy_n(full.data.begin(), 2 * n, pair.chroma.data.begin());
  } else {
    std::copy_n(full.data.begin(), n, pair.luma.data.begin());
    std::copy_n(full.data.begin() + n, 2 * n, pair.chroma.data.begin());
  }
  return pair;
}

GamutResult merge_luma(const LumaChromaPair& pair) {
  const PlanarImage& luma = pair.luma;
  const PlanarImage& chroma = pair.chroma;
  if (!luma.same_size(chroma) || luma.channels != 1 || chroma.channels != 2) {
    throw Error(ErrorCode::DimensionMismatch,
                "merge_luma: luma " + std::to_string(luma.height) + "x" +
                    std::to_string(luma.width) + " vs chroma " +
                    std::to_string(chroma.height) + "x" + std::to_string(chroma.width));
  }
  const std::size_t n = luma.plane_size();
  if (chroma.space == ColorSpace::Hsv) {
    PlanarImage hsv(luma.height, luma.width, 3, ColorSpace::Hsv);
    std::copy_n(chroma.data.begin(), 2 * n, hsv.data.begin());
    std::copy_n(luma.data.begin(), n, hsv.data.begin() + 2 * n);
    GamutResult result;
    result.rgb = hsv_to_rgb(hsv);
    result.clamped.assign(n, 0);
    return result;
  }
  if (chroma.space == ColorSpace::YCbCr) {
    PlanarImage ycc(luma.height, luma.width, 3, ColorSpace::YCbCr);
    std::copy_n(luma.data.begin(), n, ycc.data.begin());
    std::copy_n(chroma.data.begin(), 2 * n, ycc.data.begin() + n);
    return ycbcr_to_rgb(ycc);
  }
  throw Error(ErrorCode::WrongSpace, std::string("merge_luma: chroma tagged ") +
                                         to_string(chroma.space));
}

PlanarImage extract_luma(const PlanarImage& rgb, ColorSpace space) {
  require_space(rgb, ColorSpace::Rgb, 3, "extract_luma");
  PlanarImage out(rgb.height, rgb.width, 1, ColorSpace::Gray);
  const std::size_t n = rgb.plane_size();
  for (std::size_t i = 0; i < n; ++i) {
    const Rgb p{rgb.data[i], rgb.data[n + i], rgb.data[2 * n + i]};
    if (space == ColorSpace::Hsv) {
      out.data[i] = static_cast<float>(std::max({p.r, p.g, p.b}));
    } else if (space == ColorSpace::YCbCr) {
      out.data[i] = static_cast<float>(rgb_to_ycbcr(p).y);
    } else {
      throw Error(ErrorCode::WrongSpace, "extract_luma supports hsv and ycbcr");
    }
  }
  return out;
}

}  // namespace lumasci
