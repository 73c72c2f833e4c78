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

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "image.hpp"
#include "metrics.hpp"
#include "sci_model.hpp"

namespace lumasci {

struct EnhanceResult {
  PlanarImage rgb;
  bool out_of_gamut = false;
  std::vector<std::uint8_t> clamped;  // per pixel (YCbCr mode only)
};

/// Hsv/YCbCr: enhance the luma plane with single-block inference and put the
/// original chroma planes back. Rgb: run inference on all three planes.
/// Throws ModeMismatch when the weights' channel count does not fit `mode`.
EnhanceResult enhance_image(const PlanarImage& rgb, ColorSpace mode, const SciWeights& w);

ColorSpace parse_mode(const std::string& text);

struct ChannelHistogram {
  std::string channel;
  std::array<std::uint64_t, 256> counts{};
  std::uint64_t total = 0;
};

struct InspectReport {
  ColorSpace space = ColorSpace::Hsv;
  std::vector<ChannelHistogram> channels;
  double luma_mean = 0.0;
  double luma_p99 = 0.0;
};

/// Bin index of a value in [0, 1]: bin k covers [k/256, (k+1)/256), and the
/// last bin also takes 1.0.
int histogram_bin(double value) noexcept;

/// Per-channel 256-bin histograms in Hsv (H, S, V) or YCbCr (Y, Cb, Cr; chroma
/// shifted by +0.5), plus the luma plane's mean and 99th percentile.
InspectReport inspect(const PlanarImage& rgb, ColorSpace space);

/// Sections `# channel=<name> total=<n>` then 256 `bin<TAB>count` rows;
/// trailing `# luma_mean=` and `# luma_p99=` lines.
void write_histogram_tsv(const InspectReport& report, std::ostream& out);
void write_histogram_svg(const InspectReport& report, const std::filesystem::path& path);

using Enhancer = std::function<PlanarImage(const PlanarImage& low_rgb)>;

struct EvaluateOptions {
  SsimMode ssim_mode = SsimMode::RgbMean;
  std::filesystem::path out_dir;  // metrics.tsv / metrics.json; empty skips files
  std::function<void(const std::string&)> warn;
  unsigned threads = 0;  // 0 picks the hardware concurrency
};

/// Enhances each test pair's low image at native resolution, quantizes it to
/// 8 bits, and scores it against the reference. Unreadable pairs are skipped
/// with a warning. Rows keep the split's order.
MetricsReport evaluate_split(const DatasetSplit& split, const Enhancer& enhancer,
                             const EvaluateOptions& options = {});

MetricsReport evaluate_split(const DatasetSplit& split, const SciWeights& w, ColorSpace mode,
                             const EvaluateOptions& options = {});

/// Runs fn(i) for i in [0, n) across worker threads.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace lumasci
