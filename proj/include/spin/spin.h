// Copyright 2026 The SPIN Simulator Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the SPIN simulator core. Every call returns a spin_status;
 * on failure spin_last_error() holds a message for the calling thread.
 * Handles are opaque and released with the matching *_free function. */

#ifndef SPIN_SPIN_H_
#define SPIN_SPIN_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SPIN_API __declspec(dllexport)
#else
#define SPIN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define SPIN_API_VERSION 1

typedef enum spin_status {
  SPIN_OK = 0,
  SPIN_E_SHAPE_MISMATCH = 1,
  SPIN_E_NON_SMOOTH_OP = 2,
  SPIN_E_NOT_SCALAR_ROOT = 3,
  SPIN_E_DETACHED_TENSOR = 4,
  SPIN_E_NON_FINITE_VALUE = 5,
  SPIN_E_NON_FINITE_OBJECTIVE = 6,
  SPIN_E_NON_STOCHASTIC_SOFT_LABEL = 7,
  SPIN_E_BAD_MAGIC = 8,
  SPIN_E_COUNT_MISMATCH = 9,
  SPIN_E_TRUNCATED_FILE = 10,
  SPIN_E_INVALID_CONFIG = 11,
  SPIN_E_BAD_RATIOS = 12,
  SPIN_E_INCOMPATIBLE_MODELS = 13,
  SPIN_E_EMPTY_LIST = 14,
  SPIN_E_ALL_RESTARTS_DIVERGED = 15,
  SPIN_E_IO = 16,
  SPIN_E_FORMAT = 17,
  SPIN_E_SCHEMA_MISMATCH = 18,
  SPIN_E_INVALID_ARGUMENT = 19,
  SPIN_E_INTERNAL = 100
} spin_status;

typedef struct spin_model spin_model;
typedef struct spin_gradient spin_gradient;
typedef struct spin_dataset spin_dataset;

SPIN_API int spin_api_version(void);
SPIN_API const char* spin_version(void);
SPIN_API const char* spin_status_name(spin_status status);
/* Message of the last failed call on this thread; "" after a success. */
SPIN_API const char* spin_last_error(void);

/* ---- models ---- */

/* architecture: "mlp-s" or "conv-s". */
SPIN_API spin_status spin_model_init(const char* architecture, size_t channels, size_t height,
                                     size_t width, size_t classes, uint64_t seed,
                                     spin_model** out);
SPIN_API spin_status spin_model_load(const char* descriptor, spin_model** out);
SPIN_API spin_status spin_model_save(const spin_model* model, const char* descriptor);
SPIN_API size_t spin_model_parameter_count(const spin_model* model);
/* Copies min(capacity, parameter_count) flattened parameters. */
SPIN_API spin_status spin_model_parameters(const spin_model* model, double* out, size_t capacity);
SPIN_API void spin_model_free(spin_model* model);

/* Text summary of a checkpoint or gradient descriptor. Writes at most
 * capacity bytes including the terminator; *needed receives the full size. */
SPIN_API spin_status spin_inspect_checkpoint(const char* descriptor, char* buffer, size_t capacity,
                                             size_t* needed);

/* ---- datasets ---- */

/* IDX image/label pair; downsample != 0 applies the 28x28 -> 16x16 reduction. */
SPIN_API spin_status spin_dataset_load_idx(const char* images, const char* labels, int downsample,
                                           spin_dataset** out);
SPIN_API spin_status spin_synth_signs(size_t per_class, size_t image_size, double noise,
                                      uint64_t seed, spin_dataset** out);
SPIN_API spin_status spin_dataset_write_idx(const spin_dataset* dataset, const char* images,
                                            const char* labels);
/* One PGM per example; *written (may be NULL) receives the file count. */
SPIN_API spin_status spin_dataset_export_pgm(const spin_dataset* dataset, const char* dir, int round,
                                             size_t* written);
SPIN_API size_t spin_dataset_size(const spin_dataset* dataset);
SPIN_API size_t spin_dataset_classes(const spin_dataset* dataset);
SPIN_API size_t spin_dataset_pixels_per_example(const spin_dataset* dataset);
/* pixels needs spin_dataset_pixels_per_example() entries; label may be NULL. */
SPIN_API spin_status spin_dataset_example(const spin_dataset* dataset, size_t index, double* pixels,
                                          int* label);
/* The selected examples, in the given order. */
SPIN_API spin_status spin_dataset_subset(const spin_dataset* dataset, const size_t* indices, size_t count,
                                         spin_dataset** out);
SPIN_API void spin_dataset_free(spin_dataset* dataset);

/* ---- gradients ---- */

/* Gradient of the mean cross-entropy of the selected examples at `model`. */
SPIN_API spin_status spin_capture_gradient(const spin_model* model, const spin_dataset* dataset,
                                           const size_t* indices, size_t count,
                                           spin_gradient** out);
SPIN_API spin_status spin_gradient_load(const char* descriptor, spin_gradient** out);
/* The gradient is stored with the architecture of `model`. */
SPIN_API spin_status spin_gradient_save(const spin_gradient* gradient, const spin_model* model,
                                        const char* descriptor);
SPIN_API size_t spin_gradient_batch_size(const spin_gradient* gradient);
SPIN_API void spin_gradient_free(spin_gradient* gradient);

/* ---- inversion ---- */

typedef struct spin_invert_options {
  size_t restarts;
  size_t max_evaluations;
  size_t history_size;
  double initial_step;
  uint64_t seed;
  size_t threads;
} spin_invert_options;

SPIN_API void spin_invert_options_default(spin_invert_options* options);

typedef struct spin_invert_result {
  double matching_loss;
  size_t best_restart;
  size_t batch_size;
  int labels[64]; /* first min(batch_size, 64) recovered labels */
} spin_invert_result;

/* Standalone inversion of `gradient` at `model`. With out_dir non-NULL the
 * reconstruction PGMs and trace.csv are written there (created if absent).
 * reconstruction (may be NULL) receives the clamped images as a dataset. */
SPIN_API spin_status spin_invert(const spin_model* model, const spin_gradient* gradient,
                                 const spin_invert_options* options, const char* out_dir,
                                 spin_invert_result* result, spin_dataset** reconstruction);

/* ---- scenarios ---- */

typedef struct spin_run_options {
  const char* config_path;
  const char* const* overrides; /* "section.key=value" */
  size_t override_count;
  size_t threads;          /* 0 keeps the configured value */
  const char* output_root; /* NULL: $SPIN_OUT if set, else the working directory */
  int verbose;             /* nonzero: one progress line per round on stderr */
} spin_run_options;

typedef struct spin_run_result {
  int rounds;
  double final_accuracy;
  char output_dir[1024];
} spin_run_result;

SPIN_API spin_status spin_run_scenario(const spin_run_options* options, spin_run_result* result);

/* Summary table on stdout (print != 0) and summary CSV at csv_path (may be
 * NULL). baseline may be NULL. */
SPIN_API spin_status spin_report(const char* const* metrics, size_t count, const char* baseline,
                                 const char* csv_path, int print);

#ifdef __cplusplus
}
#endif

#endif /* SPIN_SPIN_H_ */
