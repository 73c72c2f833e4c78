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

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "sci_model.hpp"
#include "test_support.hpp"

namespace {

namespace fs = std::filesystem;
using lumasci::testing::TempDir;
using namespace lumasci::cli;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "lumasci");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  ::testing::internal::CaptureStdout();
  ::testing::internal::CaptureStderr();
  const int code = cli_main(static_cast<int>(argv.size()), argv.data());
  CliRun r{code, ::testing::internal::GetCapturedStdout(), ::testing::internal::GetCapturedStderr()};
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_bin_rows(const std::string& tsv) {
  std::istringstream in(tsv);
  std::string line;
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') ++rows;
  return rows;
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, kExitUsage);
  CliRun r = run({"inspect", "--bogus"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("--space"), std::string::npos) << r.err;  // usage text lists options
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"enhance", "--weights", "w.sciw"}).code, kExitUsage);
}

TEST(Cli, HelpExitsCleanly) { EXPECT_EQ(run({"--help"}).code, kExitOk); }

TEST(Cli, InspectToStdoutAndFiles) {
  TempDir tmp;
  const std::string img = lumasci::testing::fixture("lowlight_100x150.png").string();
  CliRun r = run({"inspect", "--in", img, "--space", "hsv"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(count_bin_rows(r.out), 3 * 256);
  EXPECT_NE(r.out.find("# channel=V total=15000"), std::string::npos);

  r = run({"inspect", "--in", img, "--space", "ycbcr", "--out", (tmp / "h.tsv").string(), "--svg",
           (tmp / "h.svg").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(count_bin_rows(slurp(tmp / "h.tsv")), 3 * 256);
  EXPECT_NE(slurp(tmp / "h.svg").find("<svg"), std::string::npos);

  EXPECT_EQ(run({"inspect", "--in", img, "--space", "lab"}).code, kExitUsage);
  EXPECT_EQ(run({"inspect", "--in", (tmp / "none.png").string(), "--space", "hsv"}).code, kExitData);
}

TEST(Cli, EnhanceDirectory) {
  TempDir tmp;
  fs::create_directories(tmp / "in");
  const auto photos = lumasci::testing::fixture_photos();
  ASSERT_GE(photos.size(), 3u);
  for (int i = 0; i < 3; ++i) fs::copy_file(photos[i], tmp / "in" / photos[i].filename());
  std::ofstream(tmp / "in" / "readme.txt") << "not an image";
  lumasci::save_weights(lumasci::make_sci_weights({1, 4, 1e-3f}, 1), tmp / "w.sciw");

  CliRun r = run({"enhance", "--weights", (tmp / "w.sciw").string(), "--space", "ycbcr", "--in", (tmp / "in").string(),
               "--out", (tmp / "out").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::vector<std::string> written;
  for (const auto& e : fs::directory_iterator(tmp / "out")) written.push_back(e.path().filename().string());
  std::sort(written.begin(), written.end());
  ASSERT_EQ(written.size(), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(written[i], photos[i].filename().string());

  // Single file, and a weights/mode mismatch.
  r = run({"enhance", "--weights", (tmp / "w.sciw").string(), "--space", "hsv", "--in", photos[0].string(), "--out",
           (tmp / "one").string(), "--quiet"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(tmp / "one" / photos[0].filename()));
  r = run({"enhance", "--weights", (tmp / "w.sciw").string(), "--space", "rgb", "--in", photos[0].string(), "--out",
           (tmp / "two").string()});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_NE(r.err.find("ModeMismatch"), std::string::npos) << r.err;
}

TEST(Cli, EnhanceErrorPrintedOnce) {
  TempDir tmp;
  lumasci::save_weights(lumasci::make_sci_weights({1, 4, 1e-3f}, 1), tmp / "w.sciw");
  CliRun r = run({"enhance", "--weights", (tmp / "w.sciw").string(), "--space", "hsv", "--in",
               (tmp / "missing.png").string(), "--out", (tmp / "out").string()});
  EXPECT_EQ(r.code, kExitData);
  const auto first = r.err.find("missing.png");
  ASSERT_NE(first, std::string::npos);
  EXPECT_EQ(r.err.find("missing.png", first + 1), std::string::npos) << r.err;
}

TEST(Cli, MissingWeights) {
  TempDir tmp;
  CliRun r = run({"enhance", "--weights", (tmp / "w.sciw").string(), "--space", "hsv", "--in", "x.png", "--out",
               (tmp / "o").string()});
  EXPECT_EQ(r.code, kExitData);
}

TEST(Cli, TrainMissingDatasetRoot) {
  TempDir tmp;
  CliRun r = run({"train", "--dataset", (tmp / "nowhere").string(), "--kind", "lol", "--out", (tmp / "run").string()});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_NE(r.err.find("MissingDirectory"), std::string::npos) << r.err;
}

TEST(Cli, TrainRejectsUnknownConfigKey) {
  TempDir tmp;
  std::ofstream(tmp / "c.json") << R"({"batch_size": 4})";
  CliRun r = run({"train", "--config", (tmp / "c.json").string(), "--dataset", tmp.path().string()});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("batch_size"), std::string::npos) << r.err;
}

TEST(Cli, SplitManifest) {
  TempDir tmp;
  lumasci::testing::make_dataset_tree(tmp / "v2", lumasci::DatasetKind::LolV2Real, 689, 100);
  CliRun r = run({"split", "--dataset", (tmp / "v2").string(), "--kind", "lolv2", "--seed", "5", "--out",
               (tmp / "split.json").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto j = nlohmann::json::parse(slurp(tmp / "split.json"));
  EXPECT_EQ(j["seed"], 5);
  EXPECT_EQ(j["counts"]["train"], 501);
  EXPECT_EQ(j["counts"]["val"], 188);
  EXPECT_EQ(j["counts"]["test"], 100);
  EXPECT_EQ(j["val"].size(), 188u);
}

TEST(Cli, TrainThenEval) {
  TempDir tmp;
  lumasci::testing::make_dataset_tree(tmp / "data", lumasci::DatasetKind::Lol, 3, 2, true, 16, 20);
  std::ofstream(tmp / "c.json") << R"({"max_epochs": 2, "val_count": 1, "hidden_channels": 4,
      "resize_height": 12, "resize_width": 16})";
  CliRun r = run({"train", "--config", (tmp / "c.json").string(), "--dataset", (tmp / "data").string(), "--space",
               "hsv", "--out", (tmp / "run").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.err.find("epoch 2"), std::string::npos);
  EXPECT_NE(r.out.find("EPOCH_CAP"), std::string::npos);
  const std::string history = slurp(tmp / "run" / "history.tsv");
  EXPECT_NE(history.find("# stop=EPOCH_CAP best="), std::string::npos) << history;
  auto eff = nlohmann::json::parse(slurp(tmp / "run" / "effective_config.json"));
  EXPECT_EQ(eff["color_space"], "hsv");
  EXPECT_EQ(eff["max_epochs"], 2);
  EXPECT_EQ(eff["patience"], 50);

  r = run({"eval", "--weights", (tmp / "run" / "weights.sciw").string(), "--dataset", (tmp / "data").string(),
           "--space", "hsv", "--out", (tmp / "eval").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("images\t2"), std::string::npos) << r.out;
  const std::string tsv = slurp(tmp / "eval" / "metrics.tsv");
  EXPECT_EQ(std::count(tsv.begin(), tsv.end(), '\n'), 3);
  EXPECT_TRUE(fs::exists(tmp / "eval" / "metrics.json"));
}

}  // namespace
