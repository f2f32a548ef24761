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

#ifndef SPIN_FED_AGGREGATE_H_
#define SPIN_FED_AGGREGATE_H_

#include <span>
#include <string_view>
#include <vector>

#include "spin/nn/model.h"

namespace spin::fed {

enum class AggregationMode { kAverageModels, kAverageGradients };
std::string_view aggregation_mode_name(AggregationMode mode);
AggregationMode parse_aggregation_mode(std::string_view text);

// Mean of one element across inputs. Values are sorted and the mean is
// taken as min + sum(x - min) / n in ascending order, so the result does not
// depend on input order and identical inputs give back that value exactly.
double exact_mean(std::vector<double> values);

// Parameter-wise unweighted mean. The result's version is one past the
// largest input version. Errors: EmptyList, IncompatibleModels.
nn::ModelState aggregate_models(std::span<const nn::ModelState> models);

// Mean of the gradients followed by one step of `global_rate` from `prior`.
nn::ModelState aggregate_gradients(const nn::ModelState& prior,
                                   std::span<const nn::GradientVector> gradients,
                                   double global_rate);

// Sequential running mean m_k = m_{k-1} + (x_k - m_{k-1}) / k, for callers
// that receive models one at a time.
class RunningMean {
 public:
  void add(const nn::ModelState& model);
  std::size_t count() const { return count_; }
  nn::ModelState result() const;

 private:
  std::size_t count_ = 0;
  nn::ModelState first_;
  std::vector<std::vector<double>> mean_;
};

}  // namespace spin::fed

#endif  // SPIN_FED_AGGREGATE_H_
