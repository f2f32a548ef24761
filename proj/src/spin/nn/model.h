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

#ifndef SPIN_NN_MODEL_H_
#define SPIN_NN_MODEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spin/autodiff/tensor.h"
#include "spin/data/dataset.h"
#include "spin/nn/architecture.h"

namespace spin::nn {

struct NamedTensor {
  std::string name;
  ad::Tensor value;
};

// Architecture plus its parameters W. Parameter shapes always follow from
// the architecture, so two states with equal architectures can be averaged.
class ModelState {
 public:
  ModelState() = default;
  ModelState(ArchitectureSpec architecture, std::vector<ad::Tensor> parameters,
             std::uint64_t version = 0);

  // Glorot-uniform weights, a = sqrt(6 / (fan_in + fan_out)); zero biases.
  static ModelState initialize(const ArchitectureSpec& architecture, std::uint64_t seed);
  static ModelState zeros(const ArchitectureSpec& architecture);

  const ArchitectureSpec& architecture() const { return architecture_; }
  const std::vector<NamedTensor>& parameters() const { return parameters_; }
  std::vector<ad::Tensor> tensors() const;
  // Fresh recorded leaves holding the current values.
  std::vector<ad::Tensor> leaves() const;
  std::uint64_t version() const { return version_; }
  std::size_t parameter_count() const;

  ModelState with_parameters(std::vector<ad::Tensor> parameters, std::uint64_t version) const;
  bool compatible_with(const ModelState& other) const {
    return architecture_ == other.architecture_;
  }

  std::vector<double> flatten() const;

 private:
  ArchitectureSpec architecture_;
  std::vector<NamedTensor> parameters_;
  std::uint64_t version_ = 0;
};

// Parameter-shaped partial derivatives; entries may be graph-recorded.
struct GradientVector {
  std::vector<NamedTensor> entries;

  std::vector<double> flatten() const;
  bool congruent_with(const ModelState& model) const;
  bool congruent_with(const GradientVector& other) const;
  GradientVector detached() const;
};

// Runs the layer list on (B, H, W, C) inputs with the given parameter
// tensors (recorded or not). Returns (B, classes) logits.
ad::Tensor forward_logits(const ArchitectureSpec& arch, std::span<const ad::Tensor> params,
                          const ad::Tensor& inputs);
// Everything up to (not including) the final affine layer, flattened to
// (B, feature_width).
ad::Tensor forward_features(const ArchitectureSpec& arch, std::span<const ad::Tensor> params,
                            const ad::Tensor& inputs);

ad::Tensor forward(const ModelState& model, const data::Batch& batch);

// Mean softmax cross-entropy.
ad::Tensor cross_entropy_loss(const ad::Tensor& logits, std::span<const int> labels);
// Soft-label form; labels must be non-negative with rows summing to 1
// (NonStochasticSoftLabel otherwise).
ad::Tensor cross_entropy_loss(const ad::Tensor& logits, const ad::Tensor& soft_labels);

ad::Tensor batch_loss(const ModelState& model, const data::Batch& batch,
                      std::span<const ad::Tensor> params);

struct LossAndGradients {
  double loss = 0.0;
  GradientVector gradients;
};

LossAndGradients loss_and_gradients(const ModelState& model, const data::Batch& batch,
                                    bool create_graph = false);
GradientVector compute_gradients(const ModelState& model, const data::Batch& batch,
                                 bool create_graph = false);

// W <- W - learning_rate * g; version + 1.
ModelState sgd_step(const ModelState& model, const GradientVector& grads, double learning_rate);

}  // namespace spin::nn

#endif  // SPIN_NN_MODEL_H_
