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

#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lumasci/lumasci.h"

namespace lumasci::cli {

namespace {

namespace fs = std::filesystem;

struct ConfigDeleter {
  void operator()(lumasci_config* c) const { lumasci_config_free(c); }
};
struct WeightsDeleter {
  void operator()(lumasci_weights* w) const { lumasci_weights_free(w); }
};
struct ImageDeleter {
  void operator()(lumasci_image* i) const { lumasci_image_free(i); }
};
using ConfigPtr = std::unique_ptr<lumasci_config, ConfigDeleter>;
using WeightsPtr = std::unique_ptr<lumasci_weights, WeightsDeleter>;
using ImagePtr = std::unique_ptr<lumasci_image, ImageDeleter>;

// Carries a failed status out of a subcommand.
struct Failure {
  lumasci_status status;
  bool reported = false;  // message already printed
};

void check(lumasci_status status) {
  if (status != LUMASCI_OK) throw Failure{status};
}

int exit_code(lumasci_status status) {
  switch (status) {
    case LUMASCI_OK: return kExitOk;
    case LUMASCI_ERR_INVALID_ARGUMENT:
    case LUMASCI_ERR_CONFIG: return kExitUsage;
    default: return kExitData;
  }
}

ConfigPtr load_config(const std::string& path) {
  lumasci_config* raw = nullptr;
  check(path.empty() ? lumasci_config_default(&raw) : lumasci_config_load(path.c_str(), &raw));
  return ConfigPtr(raw);
}

lumasci_space parse_space(const std::string& text) {
  lumasci_space s;
  check(lumasci_parse_space(text.c_str(), &s));
  return s;
}

lumasci_dataset_kind parse_kind(const std::string& text) {
  lumasci_dataset_kind k;
  check(lumasci_parse_dataset_kind(text.c_str(), &k));
  return k;
}

WeightsPtr load_weights(const std::string& path) {
  lumasci_weights* raw = nullptr;
  check(lumasci_weights_load(path.c_str(), &raw));
  return WeightsPtr(raw);
}

bool is_png(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png";
}

struct Options {
  std::string config;
  std::string dataset;
  std::string kind = "lol";
  std::string space;
  std::string weights;
  std::string in;
  std::string out;
  std::string svg;
  std::uint64_t seed = 0;
  bool quiet = false;
};

void run_train(const Options& o) {
  ConfigPtr cfg = load_config(o.config);
  if (!o.space.empty()) check(lumasci_config_set_space(cfg.get(), parse_space(o.space)));
  if (!o.out.empty()) check(lumasci_config_set_output_dir(cfg.get(), o.out.c_str()));
  const lumasci_dataset_kind kind = parse_kind(o.kind);

  lumasci_epoch_callback cb = nullptr;
  if (!o.quiet) {
    cb = [](int epoch, double train_loss, double val_loss, void*) {
      std::fprintf(stderr, "epoch %d  train %.6f  val %.6f\n", epoch, train_loss, val_loss);
    };
  }
  lumasci_train_summary summary{};
  check(lumasci_train(cfg.get(), o.dataset.c_str(), kind, cb, nullptr, &summary, nullptr));
  const char* dir = nullptr;
  check(lumasci_config_output_dir(cfg.get(), &dir));
  std::cout << "stopped after " << summary.epochs_run << " epochs ("
            << (summary.early_stopped ? "EARLY_STOP" : "EPOCH_CAP") << "), best epoch " << summary.best_epoch
            << ", validation loss " << summary.best_val_loss << "\nweights: " << (fs::path(dir) / "weights.sciw").string()
            << '\n';
}

void run_enhance(const Options& o) {
  WeightsPtr w = load_weights(o.weights);
  const lumasci_space space = parse_space(o.space);

  std::vector<fs::path> inputs;
  std::error_code ec;
  if (fs::is_directory(o.in, ec)) {
    for (const auto& e : fs::directory_iterator(o.in)) {
      if (e.is_regular_file() && is_png(e.path())) inputs.push_back(e.path());
    }
    std::sort(inputs.begin(), inputs.end());
  } else {
    inputs.emplace_back(o.in);
  }
  fs::create_directories(o.out);

  lumasci_status first_error = LUMASCI_OK;
  for (const auto& path : inputs) {
    lumasci_image* raw_in = nullptr;
    lumasci_status st = lumasci_image_load(path.c_str(), &raw_in);
    ImagePtr in(raw_in);
    lumasci_image* raw_out = nullptr;
    int gamut = 0;
    if (st == LUMASCI_OK) st = lumasci_enhance(in.get(), space, w.get(), &raw_out, &gamut);
    ImagePtr out(raw_out);
    const fs::path target = fs::path(o.out) / path.filename().replace_extension(".png");
    if (st == LUMASCI_OK) st = lumasci_image_save(out.get(), target.c_str());
    if (st != LUMASCI_OK) {
      std::cerr << "error: " << lumasci_last_error() << '\n';
      if (first_error == LUMASCI_OK) first_error = st;
      continue;
    }
    if (!o.quiet) {
      std::cout << target.string() << (gamut ? "  (clamped out-of-gamut pixels)" : "") << '\n';
    }
  }
  if (first_error != LUMASCI_OK) throw Failure{first_error, true};
}

void run_eval(const Options& o) {
  ConfigPtr cfg = load_config(o.config);
  WeightsPtr w = load_weights(o.weights);
  const std::string out = o.out.empty() ? std::string() : o.out;
  lumasci_metrics m{};
  check(lumasci_evaluate(w.get(), o.dataset.c_str(), parse_kind(o.kind), parse_space(o.space), cfg.get(),
                         out.empty() ? nullptr : out.c_str(), &m));
  std::cout << "images\t" << m.count << "\nmean_psnr_db\t" << m.mean_psnr_db << "\nmean_ssim\t" << m.mean_ssim
            << '\n';
}

void run_inspect(const Options& o) {
  lumasci_image* raw = nullptr;
  check(lumasci_image_load(o.in.c_str(), &raw));
  ImagePtr img(raw);
  const std::string tsv = o.out.empty() ? "-" : o.out;
  check(lumasci_inspect(img.get(), parse_space(o.space), tsv.c_str(), o.svg.empty() ? nullptr : o.svg.c_str(),
                        nullptr, nullptr));
}

void run_split(const Options& o) {
  ConfigPtr cfg = load_config(o.config);
  const std::string manifest = o.out.empty() ? "split.json" : o.out;
  lumasci_split_counts counts{};
  check(lumasci_split(o.dataset.c_str(), parse_kind(o.kind), o.seed, cfg.get(), manifest.c_str(), &counts));
  std::cout << "train\t" << counts.train << "\nval\t" << counts.val << "\ntest\t" << counts.test
            << "\nmanifest\t" << manifest << '\n';
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Luminance-only low-light image enhancement with self-calibrated illumination", "lumasci"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  Options o;

  auto* train = app.add_subcommand("train", "train illumination weights on a dataset");
  train->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
  train->add_option("--dataset", o.dataset, "dataset root")->required();
  train->add_option("--kind", o.kind, "lol or lolv2")->capture_default_str();
  train->add_option("--space", o.space, "override color_space: hsv, ycbcr or rgb");
  train->add_option("--out", o.out, "output directory (overrides output_dir)");
  train->add_flag("--quiet", o.quiet, "no per-epoch progress");

  auto* enhance = app.add_subcommand("enhance", "enhance one PNG or a directory of PNGs");
  enhance->add_option("--weights", o.weights, "checkpoint file")->required();
  enhance->add_option("--space", o.space, "hsv, ycbcr or rgb")->required();
  enhance->add_option("--in", o.in, "input PNG or directory")->required();
  enhance->add_option("--out", o.out, "output directory")->required();
  enhance->add_flag("--quiet", o.quiet, "do not list written files");

  auto* eval = app.add_subcommand("eval", "score enhanced test images with PSNR and SSIM");
  eval->add_option("--weights", o.weights, "checkpoint file")->required();
  eval->add_option("--dataset", o.dataset, "dataset root")->required();
  eval->add_option("--kind", o.kind, "lol or lolv2")->capture_default_str();
  eval->add_option("--space", o.space, "hsv, ycbcr or rgb")->required();
  eval->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
  eval->add_option("--out", o.out, "directory for metrics.tsv and metrics.json");

  auto* inspect = app.add_subcommand("inspect", "per-channel histograms of an image");
  inspect->add_option("--in", o.in, "input PNG")->required();
  inspect->add_option("--space", o.space, "hsv or ycbcr")->required();
  inspect->add_option("--out", o.out, "TSV path (default: stdout)");
  inspect->add_option("--svg", o.svg, "also write an SVG bar plot");

  auto* split = app.add_subcommand("split", "write the train/val/test manifest of a dataset");
  split->add_option("--dataset", o.dataset, "dataset root")->required();
  split->add_option("--kind", o.kind, "lol or lolv2")->capture_default_str();
  split->add_option("--seed", o.seed, "validation draw seed")->capture_default_str();
  split->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
  split->add_option("--out", o.out, "manifest path (default: split.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*train) run_train(o);
    else if (*enhance) run_enhance(o);
    else if (*eval) run_eval(o);
    else if (*inspect) run_inspect(o);
    else if (*split) run_split(o);
  } catch (const Failure& f) {
    if (!f.reported && *lumasci_last_error()) std::cerr << "error: " << lumasci_last_error() << '\n';
    return exit_code(f.status);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace lumasci::cli
