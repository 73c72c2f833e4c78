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

#include <json.hpp>

#include "dataset.hpp"
#include "metrics.hpp"
#include "trainer.hpp"

namespace lumasci {

/// Everything a command can be configured with, read from a flat JSON
/// object. Unknown keys are rejected.
struct RunConfig {
  TrainConfig train;
  SsimMode ssim_mode = SsimMode::RgbMean;
  DatasetLayout layout;
  std::filesystem::path output_dir = "runs";
};

RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

/// Effective configuration with every default spelled out; dataset layout
/// defaults are resolved for `kind`.
nlohmann::json to_json(const RunConfig& cfg, DatasetKind kind);

}  // namespace lumasci
