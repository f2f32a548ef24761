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

#include "spin/spin.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spin/common/error.h"
#include "spin/data/io.h"
#include "spin/data/transforms.h"
#include "spin/experiments/config.h"
#include "spin/experiments/manifest.h"
#include "spin/experiments/report.h"
#include "spin/experiments/scenario.h"
#include "spin/inversion/inversion.h"
#include "spin/nn/checkpoint.h"
#include "spin/nn/model.h"

struct spin_model {
  spin::nn::ModelState state;
};

struct spin_gradient {
  std::optional<spin::nn::ArchitectureSpec> architecture;
  spin::nn::GradientVector gradient;
  std::size_t batch_size = 1;
};

struct spin_dataset {
  spin::data::Dataset data;
};

namespace {

thread_local std::string last_error;

spin_status to_status(spin::ErrorCode code) {
  return static_cast<spin_status>(static_cast<int>(code) + 1);
}

template <typename F>
spin_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return SPIN_OK;
  } catch (const spin::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    last_error = e.what();
    return SPIN_E_INTERNAL;
  } catch (...) {
    last_error = "unknown exception";
    return SPIN_E_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) spin::fail(spin::ErrorCode::kInvalidArgument, what);
}

std::string shape_text(const spin::ad::Shape& s) {
  if (s.empty()) return "scalar";
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "x" : "") + std::to_string(s[i]);
  return out;
}

void copy_string(const std::string& s, char* buffer, std::size_t capacity) {
  if (!buffer || capacity == 0) return;
  std::size_t n = std::min(s.size(), capacity - 1);
  std::memcpy(buffer, s.data(), n);
  buffer[n] = '\0';
}

}  // namespace

extern "C" {

int spin_api_version(void) { return SPIN_API_VERSION; }

const char* spin_version(void) {
  static const std::string v = spin::experiments::software_version();
  return v.c_str();
}

const char* spin_status_name(spin_status status) {
  if (status == SPIN_OK) return "Ok";
  if (status == SPIN_E_INTERNAL) return "Internal";
  int code = static_cast<int>(status) - 1;
  if (code < 0 || code > static_cast<int>(spin::ErrorCode::kInvalidArgument)) return "Unknown";
  static std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (int c = 0; c <= static_cast<int>(spin::ErrorCode::kInvalidArgument); ++c) {
      n.emplace_back(spin::error_code_name(static_cast<spin::ErrorCode>(c)));
    }
    return n;
  }();
  return names[static_cast<std::size_t>(code)].c_str();
}

const char* spin_last_error(void) { return last_error.c_str(); }

spin_status spin_model_init(const char* architecture, size_t channels, size_t height, size_t width,
                            size_t classes, uint64_t seed, spin_model** out) {
  return guarded([&] {
    require(architecture && out, "null argument");
    auto arch = spin::nn::ArchitectureSpec::reference(architecture, {channels, height, width}, classes);
    *out = new spin_model{spin::nn::ModelState::initialize(arch, seed)};
  });
}

spin_status spin_model_load(const char* descriptor, spin_model** out) {
  return guarded([&] {
    require(descriptor && out, "null argument");
    *out = new spin_model{spin::nn::load_checkpoint(descriptor)};
  });
}

spin_status spin_model_save(const spin_model* model, const char* descriptor) {
  return guarded([&] {
    require(model && descriptor, "null argument");
    spin::nn::save_checkpoint(model->state, descriptor);
  });
}

size_t spin_model_parameter_count(const spin_model* model) {
  return model ? model->state.parameter_count() : 0;
}

spin_status spin_model_parameters(const spin_model* model, double* out, size_t capacity) {
  return guarded([&] {
    require(model && (out || capacity == 0), "null argument");
    auto flat = model->state.flatten();
    std::copy_n(flat.begin(), std::min(capacity, flat.size()), out);
  });
}

void spin_model_free(spin_model* model) { delete model; }

spin_status spin_inspect_checkpoint(const char* descriptor, char* buffer, size_t capacity,
                                    size_t* needed) {
  return guarded([&] {
    require(descriptor, "null argument");
    auto info = spin::nn::inspect_checkpoint(descriptor);
    std::ostringstream s;
    s << "magic: " << info.magic << "\n"
      << "binary: " << info.binary.string() << "\n"
      << "architecture: " << info.architecture.to_string() << "\n"
      << "version: " << info.version << "\n";
    std::uint64_t total = 0;
    for (const auto& e : info.entries) {
      s << "param " << e.name << " shape=" << shape_text(e.shape) << " offset=" << e.offset
        << " count=" << e.count << "\n";
      total += e.count;
    }
    s << "parameters: " << total << "\n";
    for (const auto& [k, v] : info.meta) s << "meta " << k << " = " << v << "\n";
    std::string text = s.str();
    if (needed) *needed = text.size() + 1;
    copy_string(text, buffer, capacity);
  });
}

spin_status spin_dataset_load_idx(const char* images, const char* labels, int downsample,
                                  spin_dataset** out) {
  return guarded([&] {
    require(images && labels && out, "null argument");
    auto d = spin::data::load_idx(images, labels);
    if (downsample) d = spin::data::downsample_mnist(d);
    *out = new spin_dataset{std::move(d)};
  });
}

spin_status spin_synth_signs(size_t per_class, size_t image_size, double noise, uint64_t seed,
                             spin_dataset** out) {
  return guarded([&] {
    require(out, "null argument");
    spin::data::SignSynthConfig c;
    c.count_per_class = per_class;
    c.image_size = image_size;
    c.noise = noise;
    c.seed = seed;
    *out = new spin_dataset{spin::data::synth_signs(c)};
  });
}

spin_status spin_dataset_write_idx(const spin_dataset* dataset, const char* images, const char* labels) {
  return guarded([&] {
    require(dataset && images && labels, "null argument");
    spin::data::write_idx(dataset->data, images, labels);
  });
}

spin_status spin_dataset_export_pgm(const spin_dataset* dataset, const char* dir, int round,
                                    size_t* written) {
  return guarded([&] {
    require(dataset && dir, "null argument");
    auto files = spin::data::export_pgm(dataset->data, dir, round);
    if (written) *written = files.size();
  });
}

size_t spin_dataset_size(const spin_dataset* dataset) { return dataset ? dataset->data.size() : 0; }

size_t spin_dataset_classes(const spin_dataset* dataset) { return dataset ? dataset->data.classes() : 0; }

size_t spin_dataset_pixels_per_example(const spin_dataset* dataset) {
  return dataset ? dataset->data.shape().size() : 0;
}

spin_status spin_dataset_example(const spin_dataset* dataset, size_t index, double* pixels, int* label) {
  return guarded([&] {
    require(dataset && pixels, "null argument");
    if (index >= dataset->data.size()) {
      spin::fail(spin::ErrorCode::kInvalidArgument, "example index " + std::to_string(index) +
                                                        " out of range (size " +
                                                        std::to_string(dataset->data.size()) + ")");
    }
    const auto& ex = dataset->data[index];
    std::copy(ex.pixels->begin(), ex.pixels->end(), pixels);
    if (label) *label = ex.label;
  });
}

spin_status spin_dataset_subset(const spin_dataset* dataset, const size_t* indices, size_t count,
                                spin_dataset** out) {
  return guarded([&] {
    require(dataset && (indices || count == 0) && out, "null argument");
    for (size_t i = 0; i < count; ++i) {
      if (indices[i] >= dataset->data.size()) {
        spin::fail(spin::ErrorCode::kInvalidArgument, "example index " + std::to_string(indices[i]) + " out of range");
      }
    }
    *out = new spin_dataset{dataset->data.subset(std::span<const size_t>(indices, count), dataset->data.name())};
  });
}

void spin_dataset_free(spin_dataset* dataset) { delete dataset; }

spin_status spin_capture_gradient(const spin_model* model, const spin_dataset* dataset,
                                  const size_t* indices, size_t count, spin_gradient** out) {
  return guarded([&] {
    require(model && dataset && indices && out, "null argument");
    require(count > 0, "at least one example index is required");
    for (size_t i = 0; i < count; ++i) {
      if (indices[i] >= dataset->data.size()) {
        spin::fail(spin::ErrorCode::kInvalidArgument,
                   "example index " + std::to_string(indices[i]) + " out of range");
      }
    }
    auto batch = spin::data::make_batch(dataset->data, std::span<const size_t>(indices, count));
    auto g = spin::nn::compute_gradients(model->state, batch);
    *out = new spin_gradient{model->state.architecture(), g.detached(), count};
  });
}

spin_status spin_gradient_load(const char* descriptor, spin_gradient** out) {
  return guarded([&] {
    require(descriptor && out, "null argument");
    auto loaded = spin::nn::load_gradient(descriptor);
    std::size_t batch = 1;
    if (auto it = loaded.meta.find("batch_size"); it != loaded.meta.end()) {
      batch = std::stoul(it->second);
    }
    *out = new spin_gradient{loaded.architecture, std::move(loaded.gradient), batch};
  });
}

spin_status spin_gradient_save(const spin_gradient* gradient, const spin_model* model,
                               const char* descriptor) {
  return guarded([&] {
    require(gradient && model && descriptor, "null argument");
    if (!gradient->gradient.congruent_with(model->state)) {
      spin::fail(spin::ErrorCode::kShapeMismatch, "gradient is not congruent with the model");
    }
    spin::nn::save_gradient(gradient->gradient, model->state.architecture(), descriptor,
                            {{"batch_size", std::to_string(gradient->batch_size)}});
  });
}

size_t spin_gradient_batch_size(const spin_gradient* gradient) { return gradient ? gradient->batch_size : 0; }

void spin_gradient_free(spin_gradient* gradient) { delete gradient; }

void spin_invert_options_default(spin_invert_options* options) {
  if (!options) return;
  spin::inversion::InversionConfig d;
  options->restarts = d.restarts;
  options->max_evaluations = d.max_evaluations;
  options->history_size = d.history_size;
  options->initial_step = d.initial_step;
  options->seed = d.seed;
  options->threads = d.threads;
}

spin_status spin_invert(const spin_model* model, const spin_gradient* gradient,
                        const spin_invert_options* options, const char* out_dir,
                        spin_invert_result* result, spin_dataset** reconstruction) {
  return guarded([&] {
    require(model && gradient, "null argument");
    if (gradient->architecture && !(*gradient->architecture == model->state.architecture())) {
      spin::fail(spin::ErrorCode::kShapeMismatch,
                 "gradient was taken against " + gradient->architecture->to_string() +
                     " but the checkpoint is " + model->state.architecture().to_string());
    }
    if (!gradient->gradient.congruent_with(model->state)) {
      spin::fail(spin::ErrorCode::kShapeMismatch, "gradient is not congruent with the checkpoint");
    }
    spin_invert_options o;
    spin_invert_options_default(&o);
    if (options) o = *options;
    spin::inversion::InversionConfig cfg;
    cfg.restarts = o.restarts;
    cfg.max_evaluations = o.max_evaluations;
    cfg.history_size = o.history_size;
    cfg.initial_step = o.initial_step;
    cfg.seed = o.seed;
    cfg.threads = std::max<size_t>(o.threads, 1);
    cfg.batch_size = gradient->batch_size;

    spin::fed::InterceptedUpdate update;
    update.reference = model->state;
    update.gradient = gradient->gradient;
    update.batch_size = gradient->batch_size;
    auto r = spin::inversion::invert(update, cfg);
    const auto& arch = model->state.architecture();
    if (out_dir) {
      std::filesystem::create_directories(out_dir);
      spin::inversion::export_reconstruction(r, arch, out_dir);
      spin::inversion::write_trace_csv(r, std::filesystem::path(out_dir) / "trace.csv");
    }
    if (result) {
      result->matching_loss = r.matching_loss;
      result->best_restart = r.best_restart;
      result->batch_size = r.labels.size();
      std::fill(std::begin(result->labels), std::end(result->labels), -1);
      for (size_t i = 0; i < std::min<size_t>(r.labels.size(), 64); ++i) result->labels[i] = r.labels[i];
    }
    if (reconstruction) {
      *reconstruction = new spin_dataset{spin::inversion::to_dataset(r, arch, "reconstruction")};
    }
  });
}

spin_status spin_run_scenario(const spin_run_options* options, spin_run_result* result) {
  return guarded([&] {
    require(options && options->config_path, "a config path is required");
    spin::experiments::ConfigOverrides overrides;
    for (size_t i = 0; i < options->override_count; ++i) {
      std::string kv = options->overrides[i] ? options->overrides[i] : "";
      auto eq = kv.find('=');
      if (eq == std::string::npos) {
        spin::fail(spin::ErrorCode::kInvalidConfig, "override '" + kv + "': expected section.key=value");
      }
      overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
    }
    auto cfg = spin::experiments::load_config(options->config_path, overrides);
    spin::experiments::ScenarioOptions run;
    if (options->output_root) {
      run.output_root = options->output_root;
    } else if (const char* env = std::getenv("SPIN_OUT"); env && *env) {
      run.output_root = env;
    }
    if (options->threads > 0) run.threads = options->threads;
    if (options->verbose) run.log = &std::cerr;
    auto r = spin::experiments::run_scenario(cfg, run);
    if (result) {
      result->rounds = static_cast<int>(r.records.size());
      result->final_accuracy = r.final_accuracy;
      copy_string(r.output_dir.string(), result->output_dir, sizeof result->output_dir);
    }
  });
}

spin_status spin_report(const char* const* metrics, size_t count, const char* baseline,
                        const char* csv_path, int print) {
  return guarded([&] {
    require(metrics || count == 0, "null argument");
    std::vector<std::filesystem::path> files;
    for (size_t i = 0; i < count; ++i) {
      require(metrics[i] != nullptr, "null metrics path");
      files.emplace_back(metrics[i]);
    }
    std::optional<std::filesystem::path> base;
    if (baseline) base = baseline;
    auto report = spin::experiments::build_report(files, base);
    if (print) spin::experiments::print_report(report, std::cout);
    if (csv_path) spin::experiments::write_report_csv(report, csv_path);
  });
}

}  // extern "C"
