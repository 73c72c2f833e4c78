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
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "image.hpp"
#include "sci_model.hpp"

namespace lumasci {

struct TrainConfig {
  double lr = 3e-4;
  int max_epochs = 1000;
  int patience = 50;
  double min_delta = 1e-6;
  int resize_height = 400;  // 0 keeps native size
  int resize_width = 600;
  int stages = 3;
  LossConfig loss;
  std::uint64_t seed = 0;
  ColorSpace color_space = ColorSpace::YCbCr;  // Hsv, YCbCr or Rgb
  int hidden_channels = 16;
  float epsilon = 1e-3f;
  std::filesystem::path checkpoint_dir;  // empty disables checkpoint files
  int checkpoint_every = 25;
};

/// Throws InvalidArgument on a config that violates its invariants.
void validate_config(const TrainConfig& cfg);

enum class StopReason { EarlyStop, EpochCap };

const char* to_string(StopReason reason) noexcept;

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  StopReason stop = StopReason::EpochCap;
};

struct TrainResult {
  SciWeights weights;  // snapshot from the best validation epoch
  TrainHistory history;
  std::int64_t optimizer_steps = 0;
};

struct TrainHooks {
  /// Replaces the validation pass when set (used to script stopping
  /// behaviour). Receives the 1-based epoch and the current weights.
  std::function<double(int epoch, const SciWeights&)> validation_loss;
  std::function<void(const EpochRecord&)> on_epoch;
  std::function<void(const std::string&)> warn;
};

/// Channelwise bilinear resampling with corner-aligned endpoints.
PlanarImage resize_bilinear(const PlanarImage& img, int height, int width);

/// Load-time preprocessing: resize (if configured), then the luma plane for
/// Hsv/YCbCr or the RGB planes for Rgb.
PlanarImage prepare_training_input(const PlanarImage& rgb, const TrainConfig& cfg);

/// Mean unsupervised loss over `inputs` (already prepared); forward only.
double validate(const SciWeights& w, const std::vector<PlanarImage>& inputs, const TrainConfig& cfg);

/// Training over prepared network inputs held in memory.
TrainResult train_on_inputs(const TrainConfig& cfg, const std::vector<PlanarImage>& train_inputs,
                            const std::vector<PlanarImage>& val_inputs, const TrainHooks& hooks = {});

/// Training over the low-light images of a dataset split. Training images
/// are decoded per step; unreadable images are skipped with a warning.
TrainResult train(const TrainConfig& cfg, const DatasetSplit& split, const TrainHooks& hooks = {});

/// `epoch<TAB>train<TAB>val` per line, then `# stop=<reason> best=<epoch>`.
void write_history(const TrainHistory& history, const std::filesystem::path& path);

}  // namespace lumasci
