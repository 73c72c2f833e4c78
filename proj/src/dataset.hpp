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
#include <string>
#include <vector>

namespace lumasci {

enum class DatasetKind { Lol, LolV2Real };

const char* to_string(DatasetKind kind) noexcept;
DatasetKind parse_dataset_kind(const std::string& text);

struct ImagePair {
  std::string name;  // pairing key
  std::filesystem::path low;
  std::filesystem::path high;
};

struct DatasetSplit {
  DatasetKind kind = DatasetKind::Lol;
  std::filesystem::path root;
  std::uint64_t seed = 0;
  std::vector<ImagePair> train;
  std::vector<ImagePair> val;
  std::vector<ImagePair> test;
};

/// Subdirectory names and validation draw. Empty names and a negative
/// val_count take the per-kind defaults.
struct DatasetLayout {
  std::string train_low;
  std::string train_high;
  std::string test_low;
  std::string test_high;
  int val_count = -1;
  bool val_overlaps_train = false;
};

/// Fills every unset field of `layout` with the defaults for `kind`.
DatasetLayout resolve_layout(DatasetKind kind, DatasetLayout layout);

/// Pairs low/high PNGs by name and draws the validation subset from the
/// training pairs with a seeded shuffle. Without overlap the drawn pairs are
/// removed from train.
DatasetSplit scan_dataset(const std::filesystem::path& root, DatasetKind kind, std::uint64_t seed,
                          const DatasetLayout& layout = {});

/// Only the test pairs; the training directories need not exist.
DatasetSplit scan_test_split(const std::filesystem::path& root, DatasetKind kind,
                             const DatasetLayout& layout = {});

/// LOL: our485/{low,high} and eval15/{low,high}; 85 validation pairs.
DatasetSplit scan_lol(const std::filesystem::path& root, std::uint64_t seed, const DatasetLayout& layout = {});

/// LOL-v2 Real: Train/{Low,Normal} and Test/{Low,Normal}; 188 validation pairs.
DatasetSplit scan_lol_v2(const std::filesystem::path& root, std::uint64_t seed,
                         const DatasetLayout& layout = {});

/// Pairing key of a file: its stem with a leading "low", "high" or "normal"
/// tag removed (LOL-v2 names pairs low00001.png / normal00001.png).
std::string pairing_key(const std::filesystem::path& file);

void write_manifest(const DatasetSplit& split, const std::filesystem::path& path);
DatasetSplit read_manifest(const std::filesystem::path& path);

}  // namespace lumasci
