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

/* C interface to the lumasci low-light enhancement library.
 *
 * All handles are opaque and owned by the caller once returned; release them
 * with the matching *_free function. Every fallible call returns a status
 * code; on failure lumasci_last_error() holds a message for the calling
 * thread until its next failing call. */
#ifndef LUMASCI_LUMASCI_H
#define LUMASCI_LUMASCI_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LUMASCI_API __declspec(dllexport)
#else
#define LUMASCI_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lumasci_status {
  LUMASCI_OK = 0,
  LUMASCI_ERR_INVALID_ARGUMENT = 1,
  LUMASCI_ERR_CONFIG = 2,
  LUMASCI_ERR_FILE_NOT_FOUND = 3,
  LUMASCI_ERR_DECODE = 4,
  LUMASCI_ERR_IO = 5,
  LUMASCI_ERR_FORMAT = 6,
  LUMASCI_ERR_WRONG_SPACE = 7,
  LUMASCI_ERR_DIMENSION_MISMATCH = 8,
  LUMASCI_ERR_SHAPE_MISMATCH = 9,
  LUMASCI_ERR_BAD_RANGE = 10,
  LUMASCI_ERR_MODE_MISMATCH = 11,
  LUMASCI_ERR_MISSING_DIRECTORY = 12,
  LUMASCI_ERR_UNPAIRED_IMAGE = 13,
  LUMASCI_ERR_EMPTY_SPLIT = 14,
  LUMASCI_ERR_TOO_SMALL = 15,
  LUMASCI_ERR_INTERNAL = 16
} lumasci_status;

typedef enum lumasci_space {
  LUMASCI_SPACE_HSV = 0,
  LUMASCI_SPACE_YCBCR = 1,
  LUMASCI_SPACE_RGB = 2
} lumasci_space;

typedef enum lumasci_dataset_kind {
  LUMASCI_DATASET_LOL = 0,
  LUMASCI_DATASET_LOLV2_REAL = 1
} lumasci_dataset_kind;

typedef struct lumasci_image lumasci_image;
typedef struct lumasci_weights lumasci_weights;
typedef struct lumasci_config lumasci_config;

typedef struct lumasci_metrics {
  double mean_psnr_db; /* +inf when every output matched its reference */
  double mean_ssim;
  size_t count;
} lumasci_metrics;

typedef struct lumasci_split_counts {
  size_t train;
  size_t val;
  size_t test;
} lumasci_split_counts;

typedef struct lumasci_train_summary {
  int epochs_run;
  int best_epoch;
  int early_stopped; /* 1 when patience ran out, 0 at the epoch cap */
  double best_val_loss;
} lumasci_train_summary;

typedef void (*lumasci_epoch_callback)(int epoch, double train_loss, double val_loss, void* user);

LUMASCI_API const char* lumasci_version(void);
LUMASCI_API const char* lumasci_last_error(void);
LUMASCI_API const char* lumasci_status_name(lumasci_status status);

/* Parses "hsv" / "ycbcr" / "rgb" and "lol" / "lolv2". */
LUMASCI_API lumasci_status lumasci_parse_space(const char* text, lumasci_space* out);
LUMASCI_API lumasci_status lumasci_parse_dataset_kind(const char* text, lumasci_dataset_kind* out);

/* Configuration (flat JSON object; unknown keys are rejected). */
LUMASCI_API lumasci_status lumasci_config_default(lumasci_config** out);
LUMASCI_API lumasci_status lumasci_config_load(const char* path, lumasci_config** out);
LUMASCI_API lumasci_status lumasci_config_set_space(lumasci_config* cfg, lumasci_space space);
LUMASCI_API lumasci_status lumasci_config_set_seed(lumasci_config* cfg, uint64_t seed);
LUMASCI_API lumasci_status lumasci_config_set_output_dir(lumasci_config* cfg, const char* dir);
LUMASCI_API lumasci_status lumasci_config_output_dir(const lumasci_config* cfg, const char** out);
/* Writes the effective configuration, defaults resolved for `kind`. */
LUMASCI_API lumasci_status lumasci_config_write(const lumasci_config* cfg, lumasci_dataset_kind kind,
                                                const char* path);
LUMASCI_API void lumasci_config_free(lumasci_config* cfg);

/* Images: 8-bit PNG in, 8-bit PNG out, float RGB planes in between. */
LUMASCI_API lumasci_status lumasci_image_load(const char* path, lumasci_image** out);
/* `planes` holds height*width*3 floats in R, G, B plane order. */
LUMASCI_API lumasci_status lumasci_image_create(int height, int width, const float* planes,
                                                lumasci_image** out);
LUMASCI_API lumasci_status lumasci_image_save(const lumasci_image* img, const char* path);
LUMASCI_API lumasci_status lumasci_image_shape(const lumasci_image* img, int* height, int* width);
LUMASCI_API lumasci_status lumasci_image_copy_planes(const lumasci_image* img, float* dst, size_t count);
LUMASCI_API void lumasci_image_free(lumasci_image* img);

/* Checkpoints in the SCIW format. */
LUMASCI_API lumasci_status lumasci_weights_load(const char* path, lumasci_weights** out);
LUMASCI_API lumasci_status lumasci_weights_save(const lumasci_weights* w, const char* path);
LUMASCI_API lumasci_status lumasci_weights_in_channels(const lumasci_weights* w, int* out);
LUMASCI_API void lumasci_weights_free(lumasci_weights* w);

/* Single-block enhancement. `out_of_gamut` (nullable) reports YCbCr clamping. */
LUMASCI_API lumasci_status lumasci_enhance(const lumasci_image* in, lumasci_space space,
                                           const lumasci_weights* w, lumasci_image** out,
                                           int* out_of_gamut);

/* Channel histograms as TSV ("-" writes to stdout); svg_path may be NULL.
 * luma_mean / luma_p99 are nullable. */
LUMASCI_API lumasci_status lumasci_inspect(const lumasci_image* img, lumasci_space space,
                                           const char* tsv_path, const char* svg_path,
                                           double* luma_mean, double* luma_p99);

/* Scans a dataset tree and writes the split manifest JSON. `cfg` is nullable. */
LUMASCI_API lumasci_status lumasci_split(const char* root, lumasci_dataset_kind kind, uint64_t seed,
                                         const lumasci_config* cfg, const char* manifest_path,
                                         lumasci_split_counts* counts);

/* Trains on a dataset. Writes weights.sciw, history.tsv, split.json and
 * effective_config.json into the config's output directory. `callback`,
 * `summary` and `out` are nullable. */
LUMASCI_API lumasci_status lumasci_train(const lumasci_config* cfg, const char* root,
                                         lumasci_dataset_kind kind, lumasci_epoch_callback callback,
                                         void* user, lumasci_train_summary* summary,
                                         lumasci_weights** out);

/* Enhances and scores the test split; writes metrics.tsv and metrics.json
 * into out_dir (nullable to skip files). `cfg` is nullable. */
LUMASCI_API lumasci_status lumasci_evaluate(const lumasci_weights* w, const char* root,
                                            lumasci_dataset_kind kind, lumasci_space space,
                                            const lumasci_config* cfg, const char* out_dir,
                                            lumasci_metrics* metrics);

#ifdef __cplusplus
}
#endif

#endif /* LUMASCI_LUMASCI_H */
