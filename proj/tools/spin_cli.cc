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

// spin: command-line front end over the C API.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "spin/spin.h"

namespace {

int report_failure(spin_status status) {
  std::fprintf(stderr, "spin: %s\n", spin_last_error());
  return status == SPIN_E_INVALID_CONFIG ? 2 : 1;
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using ModelPtr = std::unique_ptr<spin_model, Deleter<spin_model, spin_model_free>>;
using DatasetPtr = std::unique_ptr<spin_dataset, Deleter<spin_dataset, spin_dataset_free>>;
using GradientPtr = std::unique_ptr<spin_gradient, Deleter<spin_gradient, spin_gradient_free>>;

struct RunArgs {
  std::string config;
  std::string arm;
  int rounds = 0;
  long long seed = -1;
  std::size_t threads = 0;
  std::vector<std::string> sets;
  std::string out;
  std::string output_root;
  bool quiet = false;
};

int cmd_run(const RunArgs& a) {
  std::vector<std::string> overrides = a.sets;
  if (!a.arm.empty()) {
    overrides.push_back("scenario.arm=" + a.arm);
    overrides.push_back(std::string("participants.attackers=") + (a.arm == "baseline" ? "0" : "1"));
  }
  if (a.rounds > 0) overrides.push_back("scenario.rounds=" + std::to_string(a.rounds));
  if (a.seed >= 0) overrides.push_back("scenario.master_seed=" + std::to_string(a.seed));
  if (!a.out.empty()) overrides.push_back("scenario.output_dir=" + a.out);
  std::vector<const char*> ptrs;
  for (const auto& o : overrides) ptrs.push_back(o.c_str());

  spin_run_options opts{};
  opts.config_path = a.config.c_str();
  opts.overrides = ptrs.data();
  opts.override_count = ptrs.size();
  opts.threads = a.threads;
  opts.output_root = a.output_root.empty() ? nullptr : a.output_root.c_str();
  opts.verbose = a.quiet ? 0 : 1;
  spin_run_result result{};
  if (spin_status s = spin_run_scenario(&opts, &result); s != SPIN_OK) return report_failure(s);
  std::printf("%d rounds, final accuracy %.4f, output in %s\n", result.rounds, result.final_accuracy,
              result.output_dir);
  return 0;
}

struct InvertArgs {
  std::string checkpoint;
  std::string gradient;
  std::string out;
  spin_invert_options options{};
};

int cmd_invert(InvertArgs& a) {
  spin_model* m = nullptr;
  if (spin_status s = spin_model_load(a.checkpoint.c_str(), &m); s != SPIN_OK) return report_failure(s);
  ModelPtr model(m);
  spin_gradient* g = nullptr;
  if (spin_status s = spin_gradient_load(a.gradient.c_str(), &g); s != SPIN_OK) return report_failure(s);
  GradientPtr gradient(g);
  spin_invert_result r{};
  if (spin_status s = spin_invert(model.get(), gradient.get(), &a.options, a.out.c_str(), &r, nullptr);
      s != SPIN_OK) {
    return report_failure(s);
  }
  std::printf("matching loss %.6e (restart %zu), labels:", r.matching_loss, r.best_restart);
  for (std::size_t i = 0; i < r.batch_size && i < 64; ++i) std::printf(" %d", r.labels[i]);
  std::printf("\nwrote %s\n", a.out.c_str());
  return 0;
}

int cmd_report(const std::vector<std::string>& files, const std::string& baseline, const std::string& csv) {
  std::vector<const char*> ptrs;
  for (const auto& f : files) ptrs.push_back(f.c_str());
  spin_status s = spin_report(ptrs.data(), ptrs.size(), baseline.empty() ? nullptr : baseline.c_str(),
                              csv.empty() ? nullptr : csv.c_str(), 1);
  if (s != SPIN_OK) return report_failure(s);
  if (!csv.empty()) std::printf("summary written to %s\n", csv.c_str());
  return 0;
}

struct SynthArgs {
  std::string kind = "signs";
  std::string out;
  std::size_t per_class = 300;
  std::size_t size = 16;
  double noise = 0.3;
  std::uint64_t seed = 7;
  std::string images;
  std::string labels;
  bool previews = false;
};

int cmd_synth(const SynthArgs& a) {
  spin_dataset* d = nullptr;
  spin_status s = SPIN_OK;
  if (a.kind == "signs") {
    s = spin_synth_signs(a.per_class, a.size, a.noise, a.seed, &d);
  } else {
    s = spin_dataset_load_idx(a.images.c_str(), a.labels.c_str(), 1, &d);
  }
  if (s != SPIN_OK) return report_failure(s);
  DatasetPtr data(d);
  std::filesystem::create_directories(a.out);
  std::string stem = (std::filesystem::path(a.out) / (a.kind == "signs" ? "signs" : "mnist-small")).string();
  std::string img = stem + "-images-idx3-ubyte";
  std::string lab = stem + "-labels-idx1-ubyte";
  if (s = spin_dataset_write_idx(data.get(), img.c_str(), lab.c_str()); s != SPIN_OK) return report_failure(s);
  std::printf("%zu examples, %zu classes -> %s, %s\n", spin_dataset_size(data.get()),
              spin_dataset_classes(data.get()), img.c_str(), lab.c_str());
  if (a.previews) {
    std::size_t written = 0;
    std::string dir = (std::filesystem::path(a.out) / "previews").string();
    if (s = spin_dataset_export_pgm(data.get(), dir.c_str(), 0, &written); s != SPIN_OK) return report_failure(s);
    std::printf("%zu previews in %s\n", written, dir.c_str());
  }
  return 0;
}

int cmd_inspect(const std::string& path) {
  std::size_t needed = 0;
  if (spin_status s = spin_inspect_checkpoint(path.c_str(), nullptr, 0, &needed); s != SPIN_OK) {
    return report_failure(s);
  }
  std::string text(needed, '\0');
  if (spin_status s = spin_inspect_checkpoint(path.c_str(), text.data(), text.size(), &needed); s != SPIN_OK) {
    return report_failure(s);
  }
  std::fputs(text.c_str(), stdout);
  return 0;
}

struct CaptureArgs {
  std::string checkpoint;
  std::string architecture = "mlp-s";
  std::uint64_t model_seed = 1;
  std::string save_checkpoint;
  std::string images;
  std::string labels;
  bool downsample = true;
  std::vector<std::size_t> indices;
  std::string out;
  std::string truth_dir;
};

int cmd_capture(const CaptureArgs& a) {
  spin_dataset* d = nullptr;
  if (spin_status s = spin_dataset_load_idx(a.images.c_str(), a.labels.c_str(), a.downsample ? 1 : 0, &d);
      s != SPIN_OK) {
    return report_failure(s);
  }
  DatasetPtr data(d);
  spin_model* m = nullptr;
  spin_status s = SPIN_OK;
  if (!a.checkpoint.empty()) {
    s = spin_model_load(a.checkpoint.c_str(), &m);
  } else {
    std::size_t side = a.downsample ? 16 : 28;
    s = spin_model_init(a.architecture.c_str(), 1, side, side, spin_dataset_classes(data.get()), a.model_seed, &m);
  }
  if (s != SPIN_OK) return report_failure(s);
  ModelPtr model(m);
  if (!a.save_checkpoint.empty()) {
    if (s = spin_model_save(model.get(), a.save_checkpoint.c_str()); s != SPIN_OK) return report_failure(s);
  }
  spin_gradient* g = nullptr;
  if (s = spin_capture_gradient(model.get(), data.get(), a.indices.data(), a.indices.size(), &g); s != SPIN_OK) {
    return report_failure(s);
  }
  GradientPtr gradient(g);
  if (s = spin_gradient_save(gradient.get(), model.get(), a.out.c_str()); s != SPIN_OK) return report_failure(s);
  std::printf("gradient of %zu example(s) written to %s\n", a.indices.size(), a.out.c_str());
  if (!a.truth_dir.empty()) {
    spin_dataset* t = nullptr;
    if (s = spin_dataset_subset(data.get(), a.indices.data(), a.indices.size(), &t); s != SPIN_OK) {
      return report_failure(s);
    }
    DatasetPtr truth(t);
    std::size_t written = 0;
    if (s = spin_dataset_export_pgm(truth.get(), a.truth_dir.c_str(), 0, &written); s != SPIN_OK) {
      return report_failure(s);
    }
    std::printf("%zu ground-truth image(s) in %s\n", written, a.truth_dir.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SPIN federated-learning attack simulator"};
  app.set_version_flag("--version", std::string(spin_version()));
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run one scenario from a config file");
  run_cmd->add_option("config", run.config, "Scenario INI file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--arm", run.arm, "Override the arm (also sets the attacker count)")
      ->check(CLI::IsMember({"baseline", "inversion-only", "spin"}));
  run_cmd->add_option("--rounds", run.rounds, "Override scenario.rounds");
  run_cmd->add_option("--seed", run.seed, "Override scenario.master_seed");
  run_cmd->add_option("--threads", run.threads, "Cap worker threads (results do not depend on it)");
  run_cmd->add_option("--set", run.sets, "Override any key: section.key=value")->take_all();
  run_cmd->add_option("--out", run.out, "Override scenario.output_dir");
  run_cmd->add_option("--output-root", run.output_root, "Root for relative output dirs (default $SPIN_OUT)");
  run_cmd->add_flag("-q,--quiet", run.quiet, "No per-round progress");

  InvertArgs inv;
  spin_invert_options_default(&inv.options);
  auto* inv_cmd = app.add_subcommand("invert", "Reconstruct inputs from a serialized gradient");
  inv_cmd->add_option("--checkpoint", inv.checkpoint, "Model the gradient was taken at")->required();
  inv_cmd->add_option("--gradient", inv.gradient, "Gradient descriptor (SPINGRD1)")->required();
  inv_cmd->add_option("--out", inv.out, "Output directory (created if absent)")->required();
  inv_cmd->add_option("--restarts", inv.options.restarts, "Random restarts")->capture_default_str();
  inv_cmd->add_option("--max-evaluations", inv.options.max_evaluations, "Objective evaluations per restart")
      ->capture_default_str();
  inv_cmd->add_option("--history", inv.options.history_size, "L-BFGS history size")->capture_default_str();
  inv_cmd->add_option("--step", inv.options.initial_step, "Initial L-BFGS step")->capture_default_str();
  inv_cmd->add_option("--seed", inv.options.seed, "Restart seed")->capture_default_str();
  inv_cmd->add_option("--threads", inv.options.threads, "Parallel restarts")->capture_default_str();

  std::vector<std::string> report_files;
  std::string report_baseline, report_csv;
  auto* rep_cmd = app.add_subcommand("report", "Summarize metrics CSVs");
  rep_cmd->add_option("metrics", report_files, "metrics.csv files")->required()->check(CLI::ExistingFile);
  rep_cmd->add_option("--baseline", report_baseline, "Baseline metrics CSV")->check(CLI::ExistingFile);
  rep_cmd->add_option("--csv", report_csv, "Write the summary CSV here");

  SynthArgs synth;
  auto* syn_cmd = app.add_subcommand("synth-data", "Write a dataset as an IDX pair");
  syn_cmd->add_option("--kind", synth.kind, "signs or mnist-small")
      ->check(CLI::IsMember({"signs", "mnist-small"}))
      ->capture_default_str();
  syn_cmd->add_option("--out", synth.out, "Output directory")->required();
  syn_cmd->add_option("--per-class", synth.per_class, "signs: examples per class")->capture_default_str();
  syn_cmd->add_option("--size", synth.size, "signs: image side")->capture_default_str();
  syn_cmd->add_option("--noise", synth.noise, "signs: uniform noise amplitude")->capture_default_str();
  syn_cmd->add_option("--seed", synth.seed, "signs: seed")->capture_default_str();
  syn_cmd->add_option("--images", synth.images, "mnist-small: source IDX images");
  syn_cmd->add_option("--labels", synth.labels, "mnist-small: source IDX labels");
  syn_cmd->add_flag("--previews", synth.previews, "Also export every example as PGM");

  std::string inspect_path;
  auto* ins_cmd = app.add_subcommand("inspect-checkpoint", "Describe a checkpoint or gradient file");
  ins_cmd->add_option("descriptor", inspect_path, "Descriptor path")->required();

  CaptureArgs cap;
  auto* cap_cmd = app.add_subcommand("capture-gradient", "Serialize the gradient of known examples");
  cap_cmd->add_option("--checkpoint", cap.checkpoint, "Model to differentiate (default: fresh init)");
  cap_cmd->add_option("--architecture", cap.architecture, "Fresh model architecture")
      ->check(CLI::IsMember({"mlp-s", "conv-s"}))
      ->capture_default_str();
  cap_cmd->add_option("--model-seed", cap.model_seed, "Fresh model seed")->capture_default_str();
  cap_cmd->add_option("--save-checkpoint", cap.save_checkpoint, "Also save the model used");
  cap_cmd->add_option("--images", cap.images, "IDX images")->required();
  cap_cmd->add_option("--labels", cap.labels, "IDX labels")->required();
  cap_cmd->add_option("--downsample", cap.downsample, "Apply the 28x28 -> 16x16 reduction")->capture_default_str();
  cap_cmd->add_option("--index", cap.indices, "Example index (repeatable)")->required();
  cap_cmd->add_option("--out", cap.out, "Gradient descriptor path")->required();
  cap_cmd->add_option("--truth-dir", cap.truth_dir, "Export the selected examples as PGM");

  CLI11_PARSE(app, argc, argv);

  if (synth.kind == "mnist-small" && (synth.images.empty() || synth.labels.empty()) && *syn_cmd) {
    std::fprintf(stderr, "spin: synth-data --kind mnist-small needs --images and --labels\n");
    return 2;
  }
  if (*run_cmd) return cmd_run(run);
  if (*inv_cmd) return cmd_invert(inv);
  if (*rep_cmd) return cmd_report(report_files, report_baseline, report_csv);
  if (*syn_cmd) return cmd_synth(synth);
  if (*ins_cmd) return cmd_inspect(inspect_path);
  if (*cap_cmd) return cmd_capture(cap);
  return 2;
}
