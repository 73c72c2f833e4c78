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

#include "metrics.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "color_space.hpp"
#include "error.hpp"

namespace lumasci {

namespace {

void require_same(const PlanarImage& a, const PlanarImage& b, const char* op) {
  if (!a.same_size(b) || a.channels != b.channels) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(op) + ": " + std::to_string(a.height) + "x" + std::to_string(a.width) + "x" +
                    std::to_string(a.channels) + " vs " + std::to_string(b.height) + "x" +
                    std::to_string(b.width) + "x" + std::to_string(b.channels));
  }
}

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::array<double, kWindow> gaussian_taps() {
  std::array<double, kWindow> taps{};
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kWindow / 2;
    taps[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    sum += taps[static_cast<std::size_t>(i)];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

// Separable valid-region filter: (h - 10) x (w - 10) output.
std::vector<double> filter_valid(const std::vector<double>& src, int h, int w,
                                 const std::array<double, kWindow>& taps) {
  const int ow = w - kWindow + 1;
  const int oh = h - kWindow + 1;
  std::vector<double> tmp(static_cast<std::size_t>(h) * ow);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) acc += taps[static_cast<std::size_t>(k)] * src[static_cast<std::size_t>(y) * w + x + k];
      tmp[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(oh) * ow);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) acc += taps[static_cast<std::size_t>(k)] * tmp[static_cast<std::size_t>(y + k) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  return out;
}

double ssim_plane(std::span<const float> a, std::span<const float> b, int h, int w) {
  static const auto taps = gaussian_taps();
  const std::size_t n = a.size();
  std::vector<double> va(n), vb(n), aa(n), bb(n), ab(n);
  for (std::size_t i = 0; i < n; ++i) {
    va[i] = a[i];
    vb[i] = b[i];
    aa[i] = va[i] * va[i];
    bb[i] = vb[i] * vb[i];
    ab[i] = va[i] * vb[i];
  }
  const auto mu_a = filter_valid(va, h, w, taps);
  const auto mu_b = filter_valid(vb, h, w, taps);
  const auto e_aa = filter_valid(aa, h, w, taps);
  const auto e_bb = filter_valid(bb, h, w, taps);
  const auto e_ab = filter_valid(ab, h, w, taps);
  double acc = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a[i];
    const double mb = mu_b[i];
    const double var_a = e_aa[i] - ma * ma;
    const double var_b = e_bb[i] - mb * mb;
    const double cov = e_ab[i] - ma * mb;
    acc += ((2.0 * ma * mb + kC1) * (2.0 * cov + kC2)) /
           ((ma * ma + mb * mb + kC1) * (var_a + var_b + kC2));
  }
  return acc / static_cast<double>(mu_a.size());
}

std::string format_value(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << v;
  return os.str();
}

}  // namespace

double psnr(const PlanarImage& a, const PlanarImage& b) {
  require_same(a, b, "psnr");
  if (a.data.empty()) throw Error(ErrorCode::TooSmall, "psnr of empty images");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = static_cast<double>(a.data[i]) - b.data[i];
    sum += d * d;
  }
  const double mse = sum / static_cast<double>(a.data.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

const char* to_string(SsimMode mode) noexcept {
  return mode == SsimMode::RgbMean ? "rgb_mean" : "luma";
}

SsimMode parse_ssim_mode(const std::string& text) {
  if (text == "rgb_mean") return SsimMode::RgbMean;
  if (text == "luma") return SsimMode::Luma;
  throw Error(ErrorCode::InvalidArgument, "unknown ssim_mode '" + text + "' (expected rgb_mean or luma)");
}

double ssim(const PlanarImage& a, const PlanarImage& b, SsimMode mode) {
  require_same(a, b, "ssim");
  if (std::min(a.height, a.width) < kWindow) {
    throw Error(ErrorCode::TooSmall, "ssim needs images of at least 11x11");
  }
  if (mode == SsimMode::Luma) {
    const PlanarImage ya = extract_luma(a, ColorSpace::YCbCr);
    const PlanarImage yb = extract_luma(b, ColorSpace::YCbCr);
    return ssim_plane(ya.plane(0), yb.plane(0), a.height, a.width);
  }
  double acc = 0.0;
  for (int c = 0; c < a.channels; ++c) acc += ssim_plane(a.plane(c), b.plane(c), a.height, a.width);
  return acc / a.channels;
}

MetricsReport summarize(std::vector<MetricsRow> rows) {
  MetricsReport report;
  report.count = rows.size();
  double ps = 0.0;
  double ss = 0.0;
  for (const auto& r : rows) {
    ps += r.psnr_db;
    ss += r.ssim;
  }
  if (!rows.empty()) {
    report.mean_psnr_db = ps / static_cast<double>(rows.size());
    report.mean_ssim = ss / static_cast<double>(rows.size());
  }
  report.rows = std::move(rows);
  return report;
}

void write_report_tsv(const MetricsReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write report: " + path.string());
  for (const auto& r : report.rows) {
    out << r.name << '\t' << format_value(r.psnr_db) << '\t' << format_value(r.ssim) << '\n';
  }
  out << "mean\t" << format_value(report.mean_psnr_db) << '\t' << format_value(report.mean_ssim) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

void write_report_json(const MetricsReport& report, const std::filesystem::path& path) {
  using nlohmann::json;
  // JSON has no infinity; such values are written as the string "inf".
  auto num = [](double v) -> json {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
  };
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"name", r.name}, {"psnr_db", num(r.psnr_db)}, {"ssim", num(r.ssim)}});
  }
  json j = {{"count", report.count},
            {"mean_psnr_db", num(report.mean_psnr_db)},
            {"mean_ssim", num(report.mean_ssim)},
            {"images", rows}};
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write report: " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

}  // namespace lumasci
