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

#include <filesystem>
#include <string>
#include <vector>

#include "image.hpp"

namespace lumasci {

/// 10 log10(1 / MSE) over all pixels and channels (MAX = 1). Identical
/// images give +infinity.
double psnr(const PlanarImage& a, const PlanarImage& b);

enum class SsimMode { RgbMean, Luma };

const char* to_string(SsimMode mode) noexcept;
SsimMode parse_ssim_mode(const std::string& text);

/// Single-scale SSIM: 11x11 Gaussian window (sigma 1.5), K1 = 0.01,
/// K2 = 0.03, L = 1, valid-region windows only. RgbMean averages the three
/// channel scores; Luma scores the Y plane. Requires min(H, W) >= 11.
double ssim(const PlanarImage& a, const PlanarImage& b, SsimMode mode = SsimMode::RgbMean);

struct MetricsRow {
  std::string name;
  double psnr_db = 0.0;
  double ssim = 0.0;
};

struct MetricsReport {
  std::vector<MetricsRow> rows;
  double mean_psnr_db = 0.0;
  double mean_ssim = 0.0;
  std::size_t count = 0;
};

/// Arithmetic means over `rows` (a single infinite PSNR makes the mean
/// infinite).
MetricsReport summarize(std::vector<MetricsRow> rows);

/// `name<TAB>psnr<TAB>ssim` rows and a `mean` footer; infinity prints "inf".
void write_report_tsv(const MetricsReport& report, const std::filesystem::path& path);
void write_report_json(const MetricsReport& report, const std::filesystem::path& path);

}  // namespace lumasci
