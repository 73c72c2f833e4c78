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

#include "dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <numeric>
#include <random>

#include <json.hpp>

#include "error.hpp"

namespace lumasci {

namespace fs = std::filesystem;

const char* to_string(DatasetKind kind) noexcept {
  return kind == DatasetKind::Lol ? "lol" : "lolv2";
}

DatasetKind parse_dataset_kind(const std::string& text) {
  if (text == "lol") return DatasetKind::Lol;
  if (text == "lolv2" || text == "lolv2-real") return DatasetKind::LolV2Real;
  throw Error(ErrorCode::InvalidArgument, "unknown dataset kind '" + text + "' (expected lol or lolv2)");
}

DatasetLayout resolve_layout(DatasetKind kind, DatasetLayout layout) {
  const bool lol = kind == DatasetKind::Lol;
  if (layout.train_low.empty()) layout.train_low = lol ? "our485/low" : "Train/Low";
  if (layout.train_high.empty()) layout.train_high = lol ? "our485/high" : "Train/Normal";
  if (layout.test_low.empty()) layout.test_low = lol ? "eval15/low" : "Test/Low";
  if (layout.test_high.empty()) layout.test_high = lol ? "eval15/high" : "Test/Normal";
  if (layout.val_count < 0) layout.val_count = lol ? 85 : 188;
  return layout;
}

std::string pairing_key(const fs::path& file) {
  std::string stem = file.stem().string();
  std::string lower = stem;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (const char* tag : {"normal", "high", "low"}) {
    const std::string t(tag);
    if (lower.size() > t.size() && lower.compare(0, t.size(), t) == 0) {
      stem = stem.substr(t.size());
      if (!stem.empty() && (stem.front() == '_' || stem.front() == '-')) stem.erase(0, 1);
      break;
    }
  }
  return stem;
}

namespace {

bool is_png(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png";
}

std::vector<fs::path> list_pngs(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorCode::MissingDirectory, "missing directory: " + dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_png(entry.path())) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<ImagePair> pair_directory(const fs::path& low_dir, const fs::path& high_dir) {
  const auto lows = list_pngs(low_dir);
  const auto highs = list_pngs(high_dir);
  std::map<std::string, fs::path> by_key;
  for (const auto& h : highs) by_key.emplace(pairing_key(h), h);

  std::vector<ImagePair> pairs;
  std::vector<std::string> unpaired;
  for (const auto& l : lows) {
    const std::string key = pairing_key(l);
    auto it = by_key.find(key);
    if (it == by_key.end()) {
      unpaired.push_back(l.filename().string());
    } else {
      pairs.push_back({key, l, it->second});
    }
  }
  if (!unpaired.empty()) {
    std::string msg = "no reference image in " + high_dir.string() + " for:";
    for (const auto& u : unpaired) msg += " " + u;
    throw Error(ErrorCode::UnpairedImage, msg);
  }
  std::sort(pairs.begin(), pairs.end(), [](const ImagePair& a, const ImagePair& b) {
    return a.low.filename() < b.low.filename();
  });
  return pairs;
}

bool by_filename(const ImagePair& a, const ImagePair& b) {
  return a.low.filename() < b.low.filename();
}

}  // namespace

DatasetSplit scan_dataset(const fs::path& root, DatasetKind kind, std::uint64_t seed,
                          const DatasetLayout& requested) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw Error(ErrorCode::MissingDirectory, "missing dataset root: " + root.string());
  }
  const DatasetLayout layout = resolve_layout(kind, requested);

  DatasetSplit split;
  split.kind = kind;
  split.root = root;
  split.seed = seed;
  std::vector<ImagePair> train = pair_directory(root / layout.train_low, root / layout.train_high);
  split.test = pair_directory(root / layout.test_low, root / layout.test_high);

  const std::size_t val_count = static_cast<std::size_t>(layout.val_count);
  if (train.empty()) throw Error(ErrorCode::EmptySplit, "no training pairs under " + root.string());
  if (val_count > train.size() || (!layout.val_overlaps_train && val_count == train.size())) {
    throw Error(ErrorCode::EmptySplit, "cannot draw " + std::to_string(val_count) +
                                           " validation pairs from " + std::to_string(train.size()) +
                                           " training pairs");
  }

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> is_val(train.size(), false);
  for (std::size_t i = 0; i < val_count; ++i) is_val[order[i]] = true;

  for (std::size_t i = 0; i < train.size(); ++i) {
    if (is_val[i]) split.val.push_back(train[i]);
    if (!is_val[i] || layout.val_overlaps_train) split.train.push_back(train[i]);
  }
  std::sort(split.val.begin(), split.val.end(), by_filename);
  return split;
}

DatasetSplit scan_test_split(const fs::path& root, DatasetKind kind, const DatasetLayout& requested) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw Error(ErrorCode::MissingDirectory, "missing dataset root: " + root.string());
  }
  const DatasetLayout layout = resolve_layout(kind, requested);
  DatasetSplit split;
  split.kind = kind;
  split.root = root;
  split.test = pair_directory(root / layout.test_low, root / layout.test_high);
  return split;
}

DatasetSplit scan_lol(const fs::path& root, std::uint64_t seed, const DatasetLayout& layout) {
  return scan_dataset(root, DatasetKind::Lol, seed, layout);
}

DatasetSplit scan_lol_v2(const fs::path& root, std::uint64_t seed, const DatasetLayout& layout) {
  return scan_dataset(root, DatasetKind::LolV2Real, seed, layout);
}

void write_manifest(const DatasetSplit& split, const fs::path& path) {
  using nlohmann::json;
  auto list = [](const std::vector<ImagePair>& pairs) {
    json arr = json::array();
    for (const auto& p : pairs) {
      arr.push_back({{"name", p.name}, {"low", p.low.string()}, {"high", p.high.string()}});
    }
    return arr;
  };
  json j = {
      {"kind", to_string(split.kind)},
      {"root", split.root.string()},
      {"seed", split.seed},
      {"counts", {{"train", split.train.size()}, {"val", split.val.size()}, {"test", split.test.size()}}},
      {"train", list(split.train)},
      {"val", list(split.val)},
      {"test", list(split.test)},
  };
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write manifest: " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

DatasetSplit read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot read manifest: " + path.string());
  try {
    const auto j = nlohmann::json::parse(in);
    DatasetSplit split;
    split.kind = parse_dataset_kind(j.at("kind").get<std::string>());
    split.root = j.at("root").get<std::string>();
    split.seed = j.at("seed").get<std::uint64_t>();
    auto read = [&](const char* key, std::vector<ImagePair>& out) {
      for (const auto& e : j.at(key)) {
        out.push_back({e.at("name").get<std::string>(), e.at("low").get<std::string>(),
                       e.at("high").get<std::string>()});
      }
    };
    read("train", split.train);
    read("val", split.val);
    read("test", split.test);
    return split;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::FormatError, path.string() + ": " + e.what());
  }
}

}  // namespace lumasci
