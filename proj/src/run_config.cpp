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

#include "run_config.hpp"

#include <fstream>
#include <set>

#include "error.hpp"
#include "pipeline.hpp"

namespace lumasci {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "lr",          "max_epochs",    "patience",       "min_delta",        "resize_height",
      "resize_width", "stages",       "alpha",          "beta",             "sigma",
      "seed",        "color_space",   "hidden_channels", "epsilon",         "checkpoint_dir",
      "checkpoint_every", "ssim_mode", "val_count",     "val_overlaps_train", "train_low_dir",
      "train_high_dir", "test_low_dir", "test_high_dir", "output_dir"};
  return keys;
}

template <class V>
void read(const nlohmann::json& j, const char* key, V& out) {
  if (auto it = j.find(key); it != j.end()) {
    try {
      out = it->get<V>();
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorCode::ConfigError, std::string("config key '") + key + "' has the wrong type");
    }
  }
}

}  // namespace

RunConfig parse_run_config(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "config must be a JSON object");
  for (const auto& item : j.items()) {
    if (!known_keys().count(item.key())) {
      throw Error(ErrorCode::ConfigError, "unknown config key '" + item.key() + "'");
    }
  }
  RunConfig cfg;
  TrainConfig& t = cfg.train;
  read(j, "lr", t.lr);
  read(j, "max_epochs", t.max_epochs);
  read(j, "patience", t.patience);
  read(j, "min_delta", t.min_delta);
  read(j, "resize_height", t.resize_height);
  read(j, "resize_width", t.resize_width);
  read(j, "stages", t.stages);
  read(j, "alpha", t.loss.alpha);
  read(j, "beta", t.loss.beta);
  read(j, "sigma", t.loss.sigma);
  read(j, "seed", t.seed);
  read(j, "hidden_channels", t.hidden_channels);
  read(j, "epsilon", t.epsilon);
  read(j, "checkpoint_every", t.checkpoint_every);
  std::string text;
  if (j.contains("color_space")) {
    read(j, "color_space", text);
    try {
      t.color_space = parse_mode(text);
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigError, e.what());
    }
  }
  if (j.contains("ssim_mode")) {
    read(j, "ssim_mode", text);
    try {
      cfg.ssim_mode = parse_ssim_mode(text);
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigError, e.what());
    }
  }
  std::string path;
  if (j.contains("checkpoint_dir")) {
    read(j, "checkpoint_dir", path);
    t.checkpoint_dir = path;
  }
  if (j.contains("output_dir")) {
    read(j, "output_dir", path);
    cfg.output_dir = path;
  }
  read(j, "val_count", cfg.layout.val_count);
  read(j, "val_overlaps_train", cfg.layout.val_overlaps_train);
  read(j, "train_low_dir", cfg.layout.train_low);
  read(j, "train_high_dir", cfg.layout.train_high);
  read(j, "test_low_dir", cfg.layout.test_low);
  read(j, "test_high_dir", cfg.layout.test_high);
  try {
    validate_config(t);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot read config: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
  return parse_run_config(j);
}

nlohmann::json to_json(const RunConfig& cfg, DatasetKind kind) {
  const TrainConfig& t = cfg.train;
  const DatasetLayout layout = resolve_layout(kind, cfg.layout);
  return {
      {"lr", t.lr},
      {"max_epochs", t.max_epochs},
      {"patience", t.patience},
      {"min_delta", t.min_delta},
      {"resize_height", t.resize_height},
      {"resize_width", t.resize_width},
      {"stages", t.stages},
      {"alpha", t.loss.alpha},
      {"beta", t.loss.beta},
      {"sigma", t.loss.sigma},
      {"seed", t.seed},
      {"color_space", to_string(t.color_space)},
      {"hidden_channels", t.hidden_channels},
      {"epsilon", t.epsilon},
      {"checkpoint_dir", t.checkpoint_dir.string()},
      {"checkpoint_every", t.checkpoint_every},
      {"ssim_mode", to_string(cfg.ssim_mode)},
      {"val_count", layout.val_count},
      {"val_overlaps_train", layout.val_overlaps_train},
      {"train_low_dir", layout.train_low},
      {"train_high_dir", layout.train_high},
      {"test_low_dir", layout.test_low},
      {"test_high_dir", layout.test_high},
      {"output_dir", cfg.output_dir.string()},
  };
}

}  // namespace lumasci
