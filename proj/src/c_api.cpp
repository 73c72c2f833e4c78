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

#include "lumasci/lumasci.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <new>
#include <string>

#include "error.hpp"
#include "pipeline.hpp"
#include "run_config.hpp"
#include "trainer.hpp"

struct lumasci_image {
  lumasci::PlanarImage img;
};

struct lumasci_weights {
  lumasci::SciWeights w;
};

struct lumasci_config {
  lumasci::RunConfig cfg;
};

namespace {

thread_local std::string g_last_error;

lumasci_status map_code(lumasci::ErrorCode code) {
  using lumasci::ErrorCode;
  switch (code) {
    case ErrorCode::FileNotFound: return LUMASCI_ERR_FILE_NOT_FOUND;
    case ErrorCode::DecodeError: return LUMASCI_ERR_DECODE;
    case ErrorCode::IoError: return LUMASCI_ERR_IO;
    case ErrorCode::FormatError: return LUMASCI_ERR_FORMAT;
    case ErrorCode::WrongSpace: return LUMASCI_ERR_WRONG_SPACE;
    case ErrorCode::DimensionMismatch: return LUMASCI_ERR_DIMENSION_MISMATCH;
    case ErrorCode::ShapeMismatch: return LUMASCI_ERR_SHAPE_MISMATCH;
    case ErrorCode::BadRange: return LUMASCI_ERR_BAD_RANGE;
    case ErrorCode::ModeMismatch: return LUMASCI_ERR_MODE_MISMATCH;
    case ErrorCode::MissingDirectory: return LUMASCI_ERR_MISSING_DIRECTORY;
    case ErrorCode::UnpairedImage: return LUMASCI_ERR_UNPAIRED_IMAGE;
    case ErrorCode::EmptySplit: return LUMASCI_ERR_EMPTY_SPLIT;
    case ErrorCode::TooSmall: return LUMASCI_ERR_TOO_SMALL;
    case ErrorCode::ConfigError: return LUMASCI_ERR_CONFIG;
    case ErrorCode::InvalidArgument: return LUMASCI_ERR_INVALID_ARGUMENT;
  }
  return LUMASCI_ERR_INTERNAL;
}

lumasci_status fail(lumasci_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <class F>
lumasci_status guarded(F&& body) noexcept {
  try {
    body();
    return LUMASCI_OK;
  } catch (const lumasci::Error& e) {
    return fail(map_code(e.code()), std::string(lumasci::to_string(e.code())) + ": " + e.what());
  } catch (const std::bad_alloc&) {
    return fail(LUMASCI_ERR_INTERNAL, "out of memory");
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(LUMASCI_ERR_IO, std::string("IoError: ") + e.what());
  } catch (const std::exception& e) {
    return fail(LUMASCI_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(LUMASCI_ERR_INTERNAL, "unknown error");
  }
}

#define REQUIRE(cond, what)                                          \
  do {                                                               \
    if (!(cond)) return fail(LUMASCI_ERR_INVALID_ARGUMENT, what);    \
  } while (0)

lumasci::ColorSpace to_space(lumasci_space s) {
  switch (s) {
    case LUMASCI_SPACE_HSV: return lumasci::ColorSpace::Hsv;
    case LUMASCI_SPACE_YCBCR: return lumasci::ColorSpace::YCbCr;
    case LUMASCI_SPACE_RGB: return lumasci::ColorSpace::Rgb;
  }
  throw lumasci::Error(lumasci::ErrorCode::InvalidArgument, "unknown color space value");
}

lumasci::DatasetKind to_kind(lumasci_dataset_kind k) {
  switch (k) {
    case LUMASCI_DATASET_LOL: return lumasci::DatasetKind::Lol;
    case LUMASCI_DATASET_LOLV2_REAL: return lumasci::DatasetKind::LolV2Real;
  }
  throw lumasci::Error(lumasci::ErrorCode::InvalidArgument, "unknown dataset kind value");
}

const lumasci::RunConfig& config_or_default(const lumasci_config* cfg) {
  static const lumasci::RunConfig defaults;
  return cfg ? cfg->cfg : defaults;
}

}  // namespace

extern "C" {

const char* lumasci_version(void) { return "0.1.0"; }

const char* lumasci_last_error(void) { return g_last_error.c_str(); }

const char* lumasci_status_name(lumasci_status status) {
  switch (status) {
    case LUMASCI_OK: return "OK";
    case LUMASCI_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case LUMASCI_ERR_CONFIG: return "ConfigError";
    case LUMASCI_ERR_FILE_NOT_FOUND: return "FileNotFound";
    case LUMASCI_ERR_DECODE: return "DecodeError";
    case LUMASCI_ERR_IO: return "IoError";
    case LUMASCI_ERR_FORMAT: return "FormatError";
    case LUMASCI_ERR_WRONG_SPACE: return "WrongSpace";
    case LUMASCI_ERR_DIMENSION_MISMATCH: return "DimensionMismatch";
    case LUMASCI_ERR_SHAPE_MISMATCH: return "ShapeMismatch";
    case LUMASCI_ERR_BAD_RANGE: return "BadRange";
    case LUMASCI_ERR_MODE_MISMATCH: return "ModeMismatch";
    case LUMASCI_ERR_MISSING_DIRECTORY: return "MissingDirectory";
    case LUMASCI_ERR_UNPAIRED_IMAGE: return "UnpairedImage";
    case LUMASCI_ERR_EMPTY_SPLIT: return "EmptySplit";
    case LUMASCI_ERR_TOO_SMALL: return "TooSmall";
    case LUMASCI_ERR_INTERNAL: return "Internal";
  }
  return "Unknown";
}

lumasci_status lumasci_parse_space(const char* text, lumasci_space* out) {
  REQUIRE(text && out, "null argument");
  return guarded([&] {
    switch (lumasci::parse_mode(text)) {
      case lumasci::ColorSpace::Hsv: *out = LUMASCI_SPACE_HSV; break;
      case lumasci::ColorSpace::YCbCr: *out = LUMASCI_SPACE_YCBCR; break;
      default: *out = LUMASCI_SPACE_RGB; break;
    }
  });
}

lumasci_status lumasci_parse_dataset_kind(const char* text, lumasci_dataset_kind* out) {
  REQUIRE(text && out, "null argument");
  return guarded([&] {
    *out = lumasci::parse_dataset_kind(text) == lumasci::DatasetKind::Lol ? LUMASCI_DATASET_LOL
                                                                          : LUMASCI_DATASET_LOLV2_REAL;
  });
}

lumasci_status lumasci_config_default(lumasci_config** out) {
  REQUIRE(out, "null output handle");
  return guarded([&] { *out = new lumasci_config{}; });
}

lumasci_status lumasci_config_load(const char* path, lumasci_config** out) {
  REQUIRE(path && out, "null argument");
  return guarded([&] { *out = new lumasci_config{lumasci::load_run_config(path)}; });
}

lumasci_status lumasci_config_set_space(lumasci_config* cfg, lumasci_space space) {
  REQUIRE(cfg, "null config");
  return guarded([&] { cfg->cfg.train.color_space = to_space(space); });
}

lumasci_status lumasci_config_set_seed(lumasci_config* cfg, uint64_t seed) {
  REQUIRE(cfg, "null config");
  cfg->cfg.train.seed = seed;
  return LUMASCI_OK;
}

lumasci_status lumasci_config_set_output_dir(lumasci_config* cfg, const char* dir) {
  REQUIRE(cfg && dir, "null argument");
  return guarded([&] { cfg->cfg.output_dir = dir; });
}

lumasci_status lumasci_config_output_dir(const lumasci_config* cfg, const char** out) {
  REQUIRE(cfg && out, "null argument");
  *out = cfg->cfg.output_dir.c_str();
  return LUMASCI_OK;
}

lumasci_status lumasci_config_write(const lumasci_config* cfg, lumasci_dataset_kind kind, const char* path) {
  REQUIRE(path, "null path");
  return guarded([&] {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw lumasci::Error(lumasci::ErrorCode::IoError, std::string("cannot write: ") + path);
    out << lumasci::to_json(config_or_default(cfg), to_kind(kind)).dump(2) << '\n';
  });
}

void lumasci_config_free(lumasci_config* cfg) { delete cfg; }

lumasci_status lumasci_image_load(const char* path, lumasci_image** out) {
  REQUIRE(path && out, "null argument");
  return guarded([&] { *out = new lumasci_image{lumasci::load_image(path)}; });
}

lumasci_status lumasci_image_create(int height, int width, const float* planes, lumasci_image** out) {
  REQUIRE(planes && out && height > 0 && width > 0, "invalid image arguments");
  return guarded([&] {
    lumasci::PlanarImage img(height, width, 3, lumasci::ColorSpace::Rgb);
    std::memcpy(img.data.data(), planes, img.data.size() * sizeof(float));
    *out = new lumasci_image{std::move(img)};
  });
}

lumasci_status lumasci_image_save(const lumasci_image* img, const char* path) {
  REQUIRE(img && path, "null argument");
  return guarded([&] { lumasci::save_image(img->img, path); });
}

lumasci_status lumasci_image_shape(const lumasci_image* img, int* height, int* width) {
  REQUIRE(img && height && width, "null argument");
  *height = img->img.height;
  *width = img->img.width;
  return LUMASCI_OK;
}

lumasci_status lumasci_image_copy_planes(const lumasci_image* img, float* dst, size_t count) {
  REQUIRE(img && dst, "null argument");
  if (count != img->img.data.size()) {
    return fail(LUMASCI_ERR_DIMENSION_MISMATCH, "destination holds " + std::to_string(count) +
                                                    " floats, image has " +
                                                    std::to_string(img->img.data.size()));
  }
  std::memcpy(dst, img->img.data.data(), count * sizeof(float));
  return LUMASCI_OK;
}

void lumasci_image_free(lumasci_image* img) { delete img; }

lumasci_status lumasci_weights_load(const char* path, lumasci_weights** out) {
  REQUIRE(path && out, "null argument");
  return guarded([&] { *out = new lumasci_weights{lumasci::load_weights(path)}; });
}

lumasci_status lumasci_weights_save(const lumasci_weights* w, const char* path) {
  REQUIRE(w && path, "null argument");
  return guarded([&] { lumasci::save_weights(w->w, path); });
}

lumasci_status lumasci_weights_in_channels(const lumasci_weights* w, int* out) {
  REQUIRE(w && out, "null argument");
  *out = w->w.in_channels;
  return LUMASCI_OK;
}

void lumasci_weights_free(lumasci_weights* w) { delete w; }

lumasci_status lumasci_enhance(const lumasci_image* in, lumasci_space space, const lumasci_weights* w,
                               lumasci_image** out, int* out_of_gamut) {
  REQUIRE(in && w && out, "null argument");
  return guarded([&] {
    lumasci::EnhanceResult r = lumasci::enhance_image(in->img, to_space(space), w->w);
    if (out_of_gamut) *out_of_gamut = r.out_of_gamut ? 1 : 0;
    *out = new lumasci_image{std::move(r.rgb)};
  });
}

lumasci_status lumasci_inspect(const lumasci_image* img, lumasci_space space, const char* tsv_path,
                               const char* svg_path, double* luma_mean, double* luma_p99) {
  REQUIRE(img, "null image");
  return guarded([&] {
    const lumasci::InspectReport report = lumasci::inspect(img->img, to_space(space));
    if (tsv_path) {
      if (std::strcmp(tsv_path, "-") == 0) {
        lumasci::write_histogram_tsv(report, std::cout);
        std::cout.flush();
      } else {
        std::ofstream out(tsv_path, std::ios::trunc);
        if (!out) throw lumasci::Error(lumasci::ErrorCode::IoError, std::string("cannot write: ") + tsv_path);
        lumasci::write_histogram_tsv(report, out);
      }
    }
    if (svg_path) lumasci::write_histogram_svg(report, svg_path);
    if (luma_mean) *luma_mean = report.luma_mean;
    if (luma_p99) *luma_p99 = report.luma_p99;
  });
}

lumasci_status lumasci_split(const char* root, lumasci_dataset_kind kind, uint64_t seed,
                             const lumasci_config* cfg, const char* manifest_path,
                             lumasci_split_counts* counts) {
  REQUIRE(root, "null dataset root");
  return guarded([&] {
    const lumasci::DatasetSplit split =
        lumasci::scan_dataset(root, to_kind(kind), seed, config_or_default(cfg).layout);
    if (manifest_path) lumasci::write_manifest(split, manifest_path);
    if (counts) *counts = {split.train.size(), split.val.size(), split.test.size()};
  });
}

lumasci_status lumasci_train(const lumasci_config* cfg, const char* root, lumasci_dataset_kind kind,
                             lumasci_epoch_callback callback, void* user, lumasci_train_summary* summary,
                             lumasci_weights** out) {
  REQUIRE(root, "null dataset root");
  return guarded([&] {
    const lumasci::RunConfig& rc = config_or_default(cfg);
    const lumasci::DatasetKind k = to_kind(kind);
    const lumasci::DatasetSplit split = lumasci::scan_dataset(root, k, rc.train.seed, rc.layout);

    const std::filesystem::path dir = rc.output_dir;
    std::filesystem::create_directories(dir);
    lumasci::write_manifest(split, dir / "split.json");
    {
      std::ofstream echo(dir / "effective_config.json", std::ios::trunc);
      echo << lumasci::to_json(rc, k).dump(2) << '\n';
    }

    lumasci::TrainHooks hooks;
    if (callback) {
      hooks.on_epoch = [&](const lumasci::EpochRecord& r) {
        callback(r.epoch, r.train_loss, r.val_loss, user);
      };
    }
    lumasci::TrainResult result = lumasci::train(rc.train, split, hooks);
    lumasci::save_weights(result.weights, dir / "weights.sciw");
    lumasci::write_history(result.history, dir / "history.tsv");

    if (summary) {
      summary->epochs_run = static_cast<int>(result.history.epochs.size());
      summary->best_epoch = result.history.best_epoch;
      summary->early_stopped = result.history.stop == lumasci::StopReason::EarlyStop ? 1 : 0;
      summary->best_val_loss =
          result.history.best_epoch > 0 ? result.history.epochs[result.history.best_epoch - 1].val_loss : 0.0;
    }
    if (out) *out = new lumasci_weights{std::move(result.weights)};
  });
}

lumasci_status lumasci_evaluate(const lumasci_weights* w, const char* root, lumasci_dataset_kind kind,
                                lumasci_space space, const lumasci_config* cfg, const char* out_dir,
                                lumasci_metrics* metrics) {
  REQUIRE(w && root, "null argument");
  return guarded([&] {
    const lumasci::RunConfig& rc = config_or_default(cfg);
    const lumasci::DatasetSplit split = lumasci::scan_test_split(root, to_kind(kind), rc.layout);
    lumasci::EvaluateOptions options;
    options.ssim_mode = rc.ssim_mode;
    if (out_dir) options.out_dir = out_dir;
    const lumasci::MetricsReport report = lumasci::evaluate_split(split, w->w, to_space(space), options);
    if (metrics) *metrics = {report.mean_psnr_db, report.mean_ssim, report.count};
  });
}

}  // extern "C"
