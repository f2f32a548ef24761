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

#include "spin/fed/aggregate.h"

#include <algorithm>

#include "spin/common/error.h"

namespace spin::fed {

std::string_view aggregation_mode_name(AggregationMode mode) {
  return mode == AggregationMode::kAverageModels ? "average-models" : "average-gradients";
}

AggregationMode parse_aggregation_mode(std::string_view text) {
  if (text == "average-models") return AggregationMode::kAverageModels;
  if (text == "average-gradients") return AggregationMode::kAverageGradients;
  fail(ErrorCode::kInvalidConfig, "aggregation mode must be average-models or average-gradients, got '" +
                                      std::string(text) + "'");
}

double exact_mean(std::vector<double> values) {
  if (values.empty()) fail(ErrorCode::kEmptyList, "mean of nothing");
  std::sort(values.begin(), values.end());
  double lo = values.front();
  double acc = 0.0;
  for (double v : values) acc += v - lo;
  return lo + acc / static_cast<double>(values.size());
}

namespace {

std::vector<ad::Tensor> elementwise_mean(const std::vector<std::vector<ad::Tensor>>& lists) {
  std::size_t n = lists.size();
  std::vector<ad::Tensor> out;
  std::vector<double> column(n);
  for (std::size_t p = 0; p < lists[0].size(); ++p) {
    std::size_t count = lists[0][p].numel();
    std::vector<double> mean(count);
    for (std::size_t k = 0; k < count; ++k) {
      for (std::size_t m = 0; m < n; ++m) column[m] = lists[m][p].values()[k];
      mean[k] = exact_mean(column);
    }
    out.push_back(ad::Tensor::constant(lists[0][p].shape(), std::move(mean)));
  }
  return out;
}

}  // namespace

nn::ModelState aggregate_models(std::span<const nn::ModelState> models) {
  if (models.empty()) fail(ErrorCode::kEmptyList, "no models to aggregate");
  std::vector<std::vector<ad::Tensor>> lists;
  std::uint64_t version = 0;
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (!models[i].compatible_with(models[0])) {
      fail(ErrorCode::kIncompatibleModels, "model " + std::to_string(i) + " (" +
                                               models[i].architecture().to_string() +
                                               ") is incompatible with model 0 (" +
                                               models[0].architecture().to_string() + ")");
    }
    lists.push_back(models[i].tensors());
    version = std::max(version, models[i].version());
  }
  return models[0].with_parameters(elementwise_mean(lists), version + 1);
}

nn::ModelState aggregate_gradients(const nn::ModelState& prior,
                                   std::span<const nn::GradientVector> gradients,
                                   double global_rate) {
  if (gradients.empty()) fail(ErrorCode::kEmptyList, "no gradients to aggregate");
  std::vector<std::vector<ad::Tensor>> lists;
  for (std::size_t i = 0; i < gradients.size(); ++i) {
    if (!gradients[i].congruent_with(prior)) {
      fail(ErrorCode::kIncompatibleModels, "gradient " + std::to_string(i) + " is not congruent with the global model");
    }
    std::vector<ad::Tensor> t;
    for (const auto& e : gradients[i].entries) t.push_back(e.value.detach());
    lists.push_back(std::move(t));
  }
  nn::GradientVector mean;
  std::vector<ad::Tensor> m = elementwise_mean(lists);
  for (std::size_t p = 0; p < m.size(); ++p) mean.entries.push_back({prior.parameters()[p].name, m[p]});
  return nn::sgd_step(prior, mean, global_rate);
}

void RunningMean::add(const nn::ModelState& model) {
  if (count_ == 0) {
    first_ = model;
    for (const auto& p : model.parameters()) mean_.push_back(p.value.vector());
    count_ = 1;
    return;
  }
  if (!model.compatible_with(first_)) {
    fail(ErrorCode::kIncompatibleModels, "model " + std::to_string(count_) + " is incompatible");
  }
  ++count_;
  double k = static_cast<double>(count_);
  const auto& params = model.parameters();
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto v = params[p].value.values();
    for (std::size_t i = 0; i < v.size(); ++i) mean_[p][i] += (v[i] - mean_[p][i]) / k;
  }
}

nn::ModelState RunningMean::result() const {
  if (count_ == 0) fail(ErrorCode::kEmptyList, "no models added");
  std::vector<ad::Tensor> params;
  for (std::size_t p = 0; p < mean_.size(); ++p) {
    params.push_back(ad::Tensor::constant(first_.parameters()[p].value.shape(), mean_[p]));
  }
  return first_.with_parameters(std::move(params), first_.version() + 1);
}

}  // namespace spin::fed
