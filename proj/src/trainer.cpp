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

#include "trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <random>

#include "color_space.hpp"
#include "error.hpp"

namespace lumasci {

const char* to_string(StopReason reason) noexcept {
  return reason == StopReason::EarlyStop ? "EARLY_STOP" : "EPOCH_CAP";
}

void validate_config(const TrainConfig& cfg) {
  auto bad = [](const std::string& m) { throw Error(ErrorCode::InvalidArgument, m); };
  if (!(cfg.lr > 0.0)) bad("lr must be positive");
  if (cfg.max_epochs < 1) bad("max_epochs must be at least 1");
  if (cfg.patience < 1) bad("patience must be at least 1");
  if (cfg.min_delta < 0.0) bad("min_delta must be non-negative");
  if (cfg.stages < 1) bad("stages must be at least 1");
  if (cfg.resize_height < 0 || cfg.resize_width < 0 ||
      (cfg.resize_height == 0) != (cfg.resize_width == 0)) {
    bad("resize must be two positive extents or both zero");
  }
  if (!(cfg.loss.sigma > 0.0)) bad("sigma must be positive");
  if (cfg.loss.alpha < 0.0 || cfg.loss.beta < 0.0) bad("loss weights must be non-negative");
  if (cfg.color_space == ColorSpace::Gray) bad("color_space must be hsv, ycbcr or rgb");
  if (cfg.checkpoint_every < 1) bad("checkpoint_every must be at least 1");
}

PlanarImage resize_bilinear(const PlanarImage& img, int height, int width) {
  if (height < 1 || width < 1) {
    throw Error(ErrorCode::InvalidArgument, "resize target must be at least 1x1");
  }
  if (img.height < 1 || img.width < 1) {
    throw Error(ErrorCode::InvalidArgument, "cannot resize an empty image");
  }
  if (height == img.height && width == img.width) return img;

  auto coords = [](int out, int in) {
    std::vector<std::pair<int, double>> m(static_cast<std::size_t>(out));
    const double scale = out > 1 ? static_cast<double>(in - 1) / (out - 1) : 0.0;
    for (int i = 0; i < out; ++i) {
      const double src = i * scale;
      int i0 = static_cast<int>(std::floor(src));
      i0 = std::clamp(i0, 0, std::max(in - 2, 0));
      m[static_cast<std::size_t>(i)] = {i0, in > 1 ? src - i0 : 0.0};
    }
    return m;
  };
  const auto rows = coords(height, img.height);
  const auto cols = coords(width, img.width);

  PlanarImage out(height, width, img.channels, img.space);
  for (int c = 0; c < img.channels; ++c) {
    for (int y = 0; y < height; ++y) {
      const auto [y0, fy] = rows[static_cast<std::size_t>(y)];
      const int y1 = std::min(y0 + 1, img.height - 1);
      for (int x = 0; x < width; ++x) {
        const auto [x0, fx] = cols[static_cast<std::size_t>(x)];
        const int x1 = std::min(x0 + 1, img.width - 1);
        const double top = img.at(c, y0, x0) * (1.0 - fx) + img.at(c, y0, x1) * fx;
        const double bot = img.at(c, y1, x0) * (1.0 - fx) + img.at(c, y1, x1) * fx;
        out.at(c, y, x) = static_cast<float>(top * (1.0 - fy) + bot * fy);
      }
    }
  }
  return out;
}

PlanarImage prepare_training_input(const PlanarImage& rgb, const TrainConfig& cfg) {
  PlanarImage img = cfg.resize_height > 0 ? resize_bilinear(rgb, cfg.resize_height, cfg.resize_width) : rgb;
  if (cfg.color_space == ColorSpace::Rgb) {
    // Interpolation is convex, but keep the network's range contract exact.
    for (float& v : img.data) v = std::clamp(v, 0.0f, 1.0f);
    return img;
  }
  return extract_luma(img, cfg.color_space);
}

double validate(const SciWeights& w, const std::vector<PlanarImage>& inputs, const TrainConfig& cfg) {
  if (inputs.empty()) throw Error(ErrorCode::EmptySplit, "validation set is empty");
  double sum = 0.0;
  for (const auto& img : inputs) {
    sum += sci_loss_value(cascade_forward(img, w, cfg.stages), cfg.loss).total;
  }
  return sum / static_cast<double>(inputs.size());
}

namespace {

using InputSource = std::function<PlanarImage(std::size_t)>;

void default_warn(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }

TrainResult run_training(const TrainConfig& cfg, std::size_t train_count, const InputSource& source,
                         const std::vector<PlanarImage>& val_inputs, const TrainHooks& hooks) {
  validate_config(cfg);
  if (train_count == 0) throw Error(ErrorCode::EmptySplit, "training set is empty");
  if (val_inputs.empty() && !hooks.validation_loss) {
    throw Error(ErrorCode::EmptySplit, "validation set is empty");
  }
  const auto warn = hooks.warn ? hooks.warn : default_warn;

  SciArchitecture arch;
  arch.in_channels = cfg.color_space == ColorSpace::Rgb ? 3 : 1;
  arch.hidden_channels = cfg.hidden_channels;
  arch.epsilon = cfg.epsilon;
  SciWeights weights = make_sci_weights(arch, cfg.seed);
  const std::vector<Tensor*> params = parameters(weights);
  AdamState adam = make_adam_state(params);

  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
  std::vector<std::size_t> order(train_count);
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  result.weights = weights;
  double best = std::numeric_limits<double>::infinity();
  int stale = 0;
  result.history.stop = StopReason::EpochCap;

  auto persist = [&] {
    if (cfg.checkpoint_dir.empty()) return;
    std::filesystem::create_directories(cfg.checkpoint_dir);
    save_weights(result.weights, cfg.checkpoint_dir / "best.sciw");
    write_history(result.history, cfg.checkpoint_dir / "history.tsv");
  };

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t used = 0;
    for (std::size_t idx : order) {
      PlanarImage input;
      try {
        input = source(idx);
      } catch (const Error& e) {
        warn(e.what());
        continue;
      }
      const CascadeTrace trace = cascade_forward(input, weights, cfg.stages);
      loss_sum += sci_loss(trace, weights, cfg.loss);
      adam_step(params, adam, cfg.lr);
      ++used;
    }
    if (used == 0) throw Error(ErrorCode::EmptySplit, "no training image could be loaded");

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(used);
    rec.val_loss = hooks.validation_loss ? hooks.validation_loss(epoch, weights)
                                         : validate(weights, val_inputs, cfg);
    result.history.epochs.push_back(rec);

    if (rec.val_loss < best - cfg.min_delta) {
      best = rec.val_loss;
      result.history.best_epoch = epoch;
      result.weights = weights;
      stale = 0;
    } else {
      ++stale;
    }
    if (hooks.on_epoch) hooks.on_epoch(rec);
    if (epoch % cfg.checkpoint_every == 0) persist();
    if (stale >= cfg.patience) {
      result.history.stop = StopReason::EarlyStop;
      break;
    }
  }
  result.optimizer_steps = adam.t;
  persist();
  return result;
}

}  // namespace

TrainResult train_on_inputs(const TrainConfig& cfg, const std::vector<PlanarImage>& train_inputs,
                            const std::vector<PlanarImage>& val_inputs, const TrainHooks& hooks) {
  return run_training(
      cfg, train_inputs.size(), [&](std::size_t i) { return train_inputs[i]; }, val_inputs, hooks);
}

TrainResult train(const TrainConfig& cfg, const DatasetSplit& split, const TrainHooks& hooks) {
  validate_config(cfg);
  if (split.train.empty()) throw Error(ErrorCode::EmptySplit, "training split is empty");
  if (split.val.empty()) throw Error(ErrorCode::EmptySplit, "validation split is empty");
  const auto warn = hooks.warn ? hooks.warn : default_warn;

  // Validation inputs are reused every epoch, so decode them once.
  std::vector<PlanarImage> val_inputs;
  for (const auto& pair : split.val) {
    try {
      val_inputs.push_back(prepare_training_input(load_image(pair.low), cfg));
    } catch (const Error& e) {
      warn(e.what());
    }
  }
  if (val_inputs.empty()) throw Error(ErrorCode::EmptySplit, "no validation image could be loaded");

  auto source = [&](std::size_t i) { return prepare_training_input(load_image(split.train[i].low), cfg); };
  return run_training(cfg, split.train.size(), source, val_inputs, hooks);
}

void write_history(const TrainHistory& history, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write history: " + path.string());
  out.precision(9);
  for (const auto& e : history.epochs) {
    out << e.epoch << '\t' << e.train_loss << '\t' << e.val_loss << '\n';
  }
  out << "# stop=" << to_string(history.stop) << " best=" << history.best_epoch << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

}  // namespace lumasci
