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

#include "pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

#include "color_space.hpp"
#include "error.hpp"

namespace lumasci {

ColorSpace parse_mode(const std::string& text) {
  if (text == "hsv") return ColorSpace::Hsv;
  if (text == "ycbcr") return ColorSpace::YCbCr;
  if (text == "rgb") return ColorSpace::Rgb;
  throw Error(ErrorCode::InvalidArgument, "unknown color space '" + text + "' (expected hsv, ycbcr or rgb)");
}

EnhanceResult enhance_image(const PlanarImage& rgb, ColorSpace mode, const SciWeights& w) {
  if (rgb.space != ColorSpace::Rgb || rgb.channels != 3) {
    throw Error(ErrorCode::WrongSpace, "enhance_image expects an RGB image");
  }
  const int needed = mode == ColorSpace::Rgb ? 3 : 1;
  if (w.in_channels != needed) {
    throw Error(ErrorCode::ModeMismatch, "weights take " + std::to_string(w.in_channels) +
                                             " channel(s) but " + to_string(mode) + " mode needs " +
                                             std::to_string(needed));
  }
  EnhanceResult result;
  if (mode == ColorSpace::Rgb) {
    result.rgb = infer(rgb, w);
    result.clamped.assign(rgb.plane_size(), 0);
    return result;
  }
  LumaChromaPair pair = split_luma(rgb, mode);
  pair.luma = infer(pair.luma, w);
  GamutResult merged = merge_luma(pair);
  result.rgb = std::move(merged.rgb);
  result.out_of_gamut = merged.out_of_gamut;
  result.clamped = std::move(merged.clamped);
  return result;
}

int histogram_bin(double value) noexcept {
  const double v = std::clamp(value, 0.0, 1.0);
  return std::min(255, static_cast<int>(std::floor(v * 256.0)));
}

InspectReport inspect(const PlanarImage& rgb, ColorSpace space) {
  PlanarImage conv;
  std::array<const char*, 3> names{};
  std::array<double, 3> offset{0.0, 0.0, 0.0};
  int luma_plane = 0;
  if (space == ColorSpace::Hsv) {
    conv = rgb_to_hsv(rgb);
    names = {"H", "S", "V"};
    luma_plane = 2;
  } else if (space == ColorSpace::YCbCr) {
    conv = rgb_to_ycbcr(rgb);
    names = {"Y", "Cb", "Cr"};
    offset = {0.0, 0.5, 0.5};
  } else {
    throw Error(ErrorCode::WrongSpace, "inspect supports hsv and ycbcr");
  }

  InspectReport report;
  report.space = space;
  for (int c = 0; c < 3; ++c) {
    ChannelHistogram h;
    h.channel = names[static_cast<std::size_t>(c)];
    for (float v : conv.plane(c)) {
      ++h.counts[static_cast<std::size_t>(histogram_bin(v + offset[static_cast<std::size_t>(c)]))];
      ++h.total;
    }
    report.channels.push_back(h);
  }

  const auto luma = conv.plane(luma_plane);
  if (!luma.empty()) {
    double sum = 0.0;
    for (float v : luma) sum += v;
    report.luma_mean = sum / static_cast<double>(luma.size());
    std::vector<float> sorted(luma.begin(), luma.end());
    // Nearest-rank percentile.
    const auto rank = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(sorted.size())));
    const std::size_t idx = rank == 0 ? 0 : rank - 1;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(idx), sorted.end());
    report.luma_p99 = sorted[idx];
  }
  return report;
}

void write_histogram_tsv(const InspectReport& report, std::ostream& out) {
  for (const auto& h : report.channels) {
    out << "# channel=" << h.channel << " total=" << h.total << '\n';
    for (std::size_t k = 0; k < h.counts.size(); ++k) out << k << '\t' << h.counts[k] << '\n';
  }
  out << "# luma_mean=" << report.luma_mean << '\n';
  out << "# luma_p99=" << report.luma_p99 << '\n';
}

void write_histogram_svg(const InspectReport& report, const std::filesystem::path& path) {
  constexpr int kPanelW = 512;
  constexpr int kPanelH = 160;
  constexpr int kGap = 30;
  const int height = static_cast<int>(report.channels.size()) * (kPanelH + kGap) + kGap;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write SVG: " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kPanelW + 40 << "\" height=\"" << height
      << "\">\n";
  int top = kGap;
  for (const auto& h : report.channels) {
    const std::uint64_t peak = std::max<std::uint64_t>(1, *std::max_element(h.counts.begin(), h.counts.end()));
    out << "  <g transform=\"translate(20," << top << ")\">\n";
    out << "    <text x=\"0\" y=\"-8\" font-family=\"sans-serif\" font-size=\"12\">" << h.channel << "</text>\n";
    out << "    <rect x=\"0\" y=\"0\" width=\"" << kPanelW << "\" height=\"" << kPanelH
        << "\" fill=\"none\" stroke=\"#888\"/>\n";
    for (std::size_t k = 0; k < h.counts.size(); ++k) {
      if (h.counts[k] == 0) continue;
      const double bar = static_cast<double>(h.counts[k]) / static_cast<double>(peak) * kPanelH;
      out << "    <rect x=\"" << k * 2 << "\" y=\"" << kPanelH - bar << "\" width=\"2\" height=\"" << bar
          << "\" fill=\"#336\"/>\n";
    }
    out << "  </g>\n";
    top += kPanelH + kGap;
  }
  out << "</svg>\n";
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

MetricsReport evaluate_split(const DatasetSplit& split, const Enhancer& enhancer,
                             const EvaluateOptions& options) {
  if (split.test.empty()) throw Error(ErrorCode::EmptySplit, "test split is empty");
  const auto warn = options.warn ? options.warn
                                 : [](const std::string& m) { std::cerr << "warning: " << m << '\n'; };

  std::vector<std::optional<MetricsRow>> rows(split.test.size());
  std::vector<std::string> warnings(split.test.size());
  parallel_for(split.test.size(), options.threads, [&](std::size_t i) {
    const ImagePair& pair = split.test[i];
    try {
      const PlanarImage low = load_image(pair.low);
      const PlanarImage high = load_image(pair.high);
      const PlanarImage enhanced = quantize_8bit(enhancer(low));
      rows[i] = MetricsRow{pair.name, psnr(enhanced, high), ssim(enhanced, high, options.ssim_mode)};
    } catch (const Error& e) {
      warnings[i] = pair.name + ": " + e.what();
    }
  });

  std::vector<MetricsRow> ok;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!warnings[i].empty()) warn(warnings[i]);
    if (rows[i]) ok.push_back(*rows[i]);
  }
  if (ok.empty()) throw Error(ErrorCode::EmptySplit, "no test pair could be evaluated");
  MetricsReport report = summarize(std::move(ok));
  if (!options.out_dir.empty()) {
    std::filesystem::create_directories(options.out_dir);
    write_report_tsv(report, options.out_dir / "metrics.tsv");
    write_report_json(report, options.out_dir / "metrics.json");
  }
  return report;
}

MetricsReport evaluate_split(const DatasetSplit& split, const SciWeights& w, ColorSpace mode,
                             const EvaluateOptions& options) {
  return evaluate_split(
      split, [&](const PlanarImage& low) { return enhance_image(low, mode, w).rgb; }, options);
}

}  // namespace lumasci
