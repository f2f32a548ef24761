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

#include "spin/nn/model.h"

#include <cmath>

#include "spin/autodiff/backward.h"
#include "spin/autodiff/ops.h"
#include "spin/common/error.h"
#include "spin/common/rng.h"

namespace spin::nn {

ModelState::ModelState(ArchitectureSpec architecture, std::vector<ad::Tensor> parameters,
                       std::uint64_t version)
    : architecture_(std::move(architecture)), version_(version) {
  architecture_.validate();
  auto specs = architecture_.parameter_specs();
  if (specs.size() != parameters.size()) {
    fail(ErrorCode::kShapeMismatch, "architecture has " + std::to_string(specs.size()) +
                                        " parameters, got " + std::to_string(parameters.size()));
  }
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (parameters[i].shape() != specs[i].shape) {
      fail(ErrorCode::kShapeMismatch, specs[i].name + " expects " + ad::shape_str(specs[i].shape) +
                                          ", got " + ad::shape_str(parameters[i].shape()));
    }
    parameters_.push_back({specs[i].name, parameters[i].detach()});
  }
}

ModelState ModelState::initialize(const ArchitectureSpec& architecture, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ad::Tensor> params;
  for (const ParamSpec& p : architecture.parameter_specs()) {
    std::vector<double> v(ad::numel(p.shape), 0.0);
    if (!p.is_bias) {
      double a = std::sqrt(6.0 / static_cast<double>(p.fan_in + p.fan_out));
      for (double& x : v) x = rng.uniform(-a, a);
    }
    params.push_back(ad::Tensor::constant(p.shape, std::move(v)));
  }
  return ModelState(architecture, std::move(params), 0);
}

ModelState ModelState::zeros(const ArchitectureSpec& architecture) {
  std::vector<ad::Tensor> params;
  for (const ParamSpec& p : architecture.parameter_specs()) params.push_back(ad::Tensor::zeros(p.shape));
  return ModelState(architecture, std::move(params), 0);
}

std::vector<ad::Tensor> ModelState::tensors() const {
  std::vector<ad::Tensor> out;
  for (const auto& p : parameters_) out.push_back(p.value);
  return out;
}

std::vector<ad::Tensor> ModelState::leaves() const {
  std::vector<ad::Tensor> out;
  for (const auto& p : parameters_) out.push_back(p.value.as_leaf());
  return out;
}

std::size_t ModelState::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : parameters_) n += p.value.numel();
  return n;
}

ModelState ModelState::with_parameters(std::vector<ad::Tensor> parameters,
                                       std::uint64_t version) const {
  return ModelState(architecture_, std::move(parameters), version);
}

std::vector<double> ModelState::flatten() const {
  std::vector<double> out;
  for (const auto& p : parameters_) out.insert(out.end(), p.value.values().begin(), p.value.values().end());
  return out;
}

std::vector<double> GradientVector::flatten() const {
  std::vector<double> out;
  for (const auto& e : entries) out.insert(out.end(), e.value.values().begin(), e.value.values().end());
  return out;
}

bool GradientVector::congruent_with(const ModelState& model) const {
  const auto& params = model.parameters();
  if (params.size() != entries.size()) return false;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].value.shape() != entries[i].value.shape()) return false;
  }
  return true;
}

bool GradientVector::congruent_with(const GradientVector& other) const {
  if (other.entries.size() != entries.size()) return false;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (other.entries[i].value.shape() != entries[i].value.shape()) return false;
  }
  return true;
}

GradientVector GradientVector::detached() const {
  GradientVector out;
  for (const auto& e : entries) out.entries.push_back({e.name, e.value.detach()});
  return out;
}

namespace {

ad::Tensor run_layers(const ArchitectureSpec& arch, std::span<const ad::Tensor> params,
                      const ad::Tensor& inputs, std::size_t layer_count) {
  const data::ImageShape& in = arch.input;
  if (inputs.rank() != 4 || inputs.dim(1) != in.height || inputs.dim(2) != in.width ||
      inputs.dim(3) != in.channels) {
    fail(ErrorCode::kShapeMismatch, "model expects (B, " + std::to_string(in.height) + ", " +
                                        std::to_string(in.width) + ", " +
                                        std::to_string(in.channels) + "), got " +
                                        ad::shape_str(inputs.shape()));
  }
  std::size_t batch = inputs.dim(0);
  ad::Tensor x = inputs;
  std::size_t p = 0;
  for (std::size_t i = 0; i < layer_count; ++i) {
    const LayerSpec& l = arch.layers[i];
    switch (l.kind) {
      case LayerKind::kAffine:
        if (x.rank() != 2) x = ad::reshape(x, {batch, x.numel() / batch});
        x = ad::affine(x, params[p], params[p + 1]);
        p += 2;
        break;
      case LayerKind::kConv: {
        std::size_t ho = x.dim(1) - l.kernel + 1, wo = x.dim(2) - l.kernel + 1;
        ad::Tensor cols = ad::im2col(x, l.kernel);
        x = ad::reshape(ad::affine(cols, params[p], params[p + 1]), {batch, ho, wo, l.width});
        p += 2;
        break;
      }
      case LayerKind::kMeanPool:
        x = ad::mean_pool2(x);
        break;
      case LayerKind::kSigmoid:
        x = ad::sigmoid(x);
        break;
      case LayerKind::kTanh:
        x = ad::tanh(x);
        break;
      case LayerKind::kRelu: {
        std::vector<ad::Tensor> in_list{x};
        x = ad::forward_op(ad::OpKind::kRelu, in_list);
        break;
      }
    }
  }
  if (x.rank() != 2) x = ad::reshape(x, {batch, x.numel() / batch});
  return x;
}

void check_param_count(const ArchitectureSpec& arch, std::span<const ad::Tensor> params) {
  if (params.size() != arch.parameter_specs().size()) {
    fail(ErrorCode::kShapeMismatch, "wrong number of parameter tensors");
  }
}

}  // namespace

ad::Tensor forward_logits(const ArchitectureSpec& arch, std::span<const ad::Tensor> params,
                          const ad::Tensor& inputs) {
  check_param_count(arch, params);
  return run_layers(arch, params, inputs, arch.layers.size());
}

ad::Tensor forward_features(const ArchitectureSpec& arch, std::span<const ad::Tensor> params,
                            const ad::Tensor& inputs) {
  check_param_count(arch, params);
  return run_layers(arch, params, inputs, arch.layers.size() - 1);
}

ad::Tensor forward(const ModelState& model, const data::Batch& batch) {
  auto params = model.tensors();
  return forward_logits(model.architecture(), params, batch.inputs);
}

ad::Tensor cross_entropy_loss(const ad::Tensor& logits, std::span<const int> labels) {
  if (logits.rank() != 2 || logits.dim(0) != labels.size()) {
    fail(ErrorCode::kShapeMismatch, "logits " + ad::shape_str(logits.shape()) + " vs " +
                                        std::to_string(labels.size()) + " labels");
  }
  std::size_t rows = logits.dim(0), cols = logits.dim(1);
  std::vector<double> onehot(rows * cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= cols) {
      fail(ErrorCode::kShapeMismatch, "label " + std::to_string(labels[i]) + " out of range");
    }
    onehot[i * cols + static_cast<std::size_t>(labels[i])] = 1.0;
  }
  ad::Tensor picked = ad::row_sum(ad::mul(logits, ad::Tensor::constant({rows, cols}, std::move(onehot))));
  return ad::mean(ad::sub(ad::log_sum_exp(logits), picked));
}

ad::Tensor cross_entropy_loss(const ad::Tensor& logits, const ad::Tensor& soft_labels) {
  if (logits.shape() != soft_labels.shape() || logits.rank() != 2) {
    fail(ErrorCode::kShapeMismatch, "logits " + ad::shape_str(logits.shape()) +
                                        " vs soft labels " + ad::shape_str(soft_labels.shape()));
  }
  std::size_t rows = logits.dim(0), cols = logits.dim(1);
  const auto y = soft_labels.values();
  for (std::size_t i = 0; i < rows; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      if (y[i * cols + j] < 0.0) fail(ErrorCode::kNonStochasticSoftLabel, "negative soft label");
      total += y[i * cols + j];
    }
    if (std::abs(total - 1.0) > 1e-9) {
      fail(ErrorCode::kNonStochasticSoftLabel,
           "soft label row " + std::to_string(i) + " sums to " + std::to_string(total));
    }
  }
  // -sum_c y_c log softmax(z)_c = lse(z) - sum_c y_c z_c for stochastic y.
  ad::Tensor picked = ad::row_sum(ad::mul(logits, soft_labels));
  return ad::mean(ad::sub(ad::log_sum_exp(logits), picked));
}

ad::Tensor batch_loss(const ModelState& model, const data::Batch& batch,
                      std::span<const ad::Tensor> params) {
  if (batch.size() == 0) fail(ErrorCode::kInvalidArgument, "empty batch");
  ad::Tensor logits = forward_logits(model.architecture(), params, batch.inputs);
  if (batch.soft_labels.defined()) return cross_entropy_loss(logits, batch.soft_labels);
  return cross_entropy_loss(logits, batch.labels);
}

LossAndGradients loss_and_gradients(const ModelState& model, const data::Batch& batch,
                                    bool create_graph) {
  std::vector<ad::Tensor> leaves = model.leaves();
  ad::Tensor loss = batch_loss(model, batch, leaves);
  std::vector<ad::Tensor> grads = ad::backward(loss, leaves, create_graph);
  LossAndGradients out;
  out.loss = loss.item();
  for (std::size_t i = 0; i < grads.size(); ++i) {
    out.gradients.entries.push_back({model.parameters()[i].name, grads[i]});
  }
  return out;
}

GradientVector compute_gradients(const ModelState& model, const data::Batch& batch,
                                 bool create_graph) {
  return loss_and_gradients(model, batch, create_graph).gradients;
}

ModelState sgd_step(const ModelState& model, const GradientVector& grads, double learning_rate) {
  if (!(learning_rate > 0.0)) fail(ErrorCode::kInvalidArgument, "learning rate must be positive");
  if (!grads.congruent_with(model)) {
    fail(ErrorCode::kShapeMismatch, "gradient is not congruent with the model");
  }
  std::vector<ad::Tensor> next;
  const auto& params = model.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto w = params[i].value.values();
    const auto g = grads.entries[i].value.values();
    std::vector<double> v(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) v[k] = w[k] - learning_rate * g[k];
    next.push_back(ad::Tensor::constant(params[i].value.shape(), std::move(v)));
  }
  return model.with_parameters(std::move(next), model.version() + 1);
}

}  // namespace spin::nn
