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

#ifndef SPIN_INVERSION_INVERSION_H_
#define SPIN_INVERSION_INVERSION_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spin/autodiff/tensor.h"
#include "spin/common/instrumentation.h"
#include "spin/data/dataset.h"
#include "spin/fed/federation.h"
#include "spin/nn/model.h"

namespace spin::inversion {

// Trainable surrogate (x', y'). The soft label is softmax(label_logits), so
// it is row-stochastic for any logits.
struct DummyPair {
  ad::Tensor pixels;        // (B, H, W, C)
  ad::Tensor label_logits;  // (B, classes)
};

// Gradient of L(M(x', W), softmax(y')) with respect to W, recorded so it can
// be differentiated again with respect to the dummy. Untracked dummy
// tensors are promoted to leaves first.
nn::GradientVector dummy_gradients(const nn::ModelState& model, const DummyPair& dummy);

// Sum over all parameters of the squared elementwise difference.
ad::Tensor matching_loss(const nn::GradientVector& dummy, const nn::GradientVector& target);

struct InversionConfig {
  std::size_t restarts = 10;
  std::size_t max_evaluations = 1000;  // objective+gradient evaluations per restart
  std::size_t history_size = 100;
  double initial_step = 0.5;
  std::size_t batch_size = 1;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  double loss_target = 0.0;
  Instrumentation* counters = nullptr;

  void validate() const;
};

struct RestartSummary {
  std::size_t restart = 0;
  bool diverged = false;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::size_t evaluations = 0;
  std::string stop;
};

struct TraceRow {
  std::size_t restart = 0;
  std::size_t iteration = 0;
  double matching_loss = 0.0;
};

struct ReconstructionResult {
  ad::Tensor pixels;       // unclamped (B, H, W, C)
  ad::Tensor soft_labels;  // (B, classes)
  std::vector<int> labels;  // argmax of soft labels, lowest index on ties
  double matching_loss = 0.0;
  std::size_t best_restart = 0;
  std::size_t restarts_used = 0;
  std::vector<RestartSummary> restarts;
  std::vector<TraceRow> trace;
};

// Standard-normal pixels and label logits for `restart`.
DummyPair random_dummy(const nn::ArchitectureSpec& arch, std::size_t batch, std::uint64_t seed);

// Minimizes the matching loss from cfg.restarts fresh initializations with
// L-BFGS and keeps the restart with the lowest final loss (lowest index on
// ties). With `init`, every restart starts from it instead. Raises
// AllRestartsDiverged if no restart had a finite objective.
ReconstructionResult invert(const fed::InterceptedUpdate& update, const InversionConfig& cfg,
                            const std::optional<DummyPair>& init = std::nullopt);

// Reconstruction as a dataset tagged `reconstructed`, pixels clamped to
// [0, 1], labels from the soft-label argmax.
data::Dataset to_dataset(const ReconstructionResult& result, const nn::ArchitectureSpec& arch,
                         std::string name, std::uint64_t first_id = 0);

std::vector<std::filesystem::path> export_reconstruction(const ReconstructionResult& result,
                                                         const nn::ArchitectureSpec& arch,
                                                         const std::filesystem::path& dir,
                                                         int round = 0);

// CSV with header restart,iteration,matching_loss.
void write_trace_csv(const ReconstructionResult& result, const std::filesystem::path& path);

// Mean squared pixel error after clamping the reconstruction to [0, 1].
double pixel_mse(const ad::Tensor& reconstruction, const ad::Tensor& truth);

}  // namespace spin::inversion

#endif  // SPIN_INVERSION_INVERSION_H_
