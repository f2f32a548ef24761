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

#ifndef SPIN_AUTODIFF_LBFGS_H_
#define SPIN_AUTODIFF_LBFGS_H_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "spin/autodiff/tensor.h"

namespace spin::ad {

struct LbfgsConfig {
  std::size_t history_size = 100;
  // Accepted steps.
  std::size_t max_iterations = 1000;
  // Objective+gradient evaluations including line-search trials; 0 = no cap.
  std::size_t max_evaluations = 0;
  // First trial step of every line search. The very first search (no
  // curvature history yet) additionally scales it by min(1, 1/|g|_1).
  double initial_step = 1.0;
  double sufficient_decrease = 1e-4;
  double contraction = 0.5;
  std::size_t max_line_search_steps = 50;
  // Stop when max |g_i| falls to this value.
  double gradient_tolerance = 1e-10;
  // Stop when the loss falls to this value.
  double loss_target = 0.0;
  // Stop when an accepted step lowers the loss by no more than this.
  double change_tolerance = 0.0;
};

enum class LbfgsStop {
  kGradientTolerance,
  kLossTarget,
  kNoProgress,
  kMaxIterations,
  kMaxEvaluations,
  kLineSearchFailed,
};

const char* stop_name(LbfgsStop stop);

struct LbfgsTracePoint {
  std::size_t iteration;
  std::size_t evaluations;
  double loss;
};

struct LbfgsResult {
  std::vector<Tensor> arguments;  // detached
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  LbfgsStop stop = LbfgsStop::kMaxIterations;
  // Set when a line search could not find sufficient decrease; the result
  // is then the best point reached, not an error.
  bool line_search_failed = false;
  std::vector<LbfgsTracePoint> trace;  // one point per accepted iterate
};

// The objective receives recorded leaves and returns a one-element tensor
// built from them.
using Objective = std::function<Tensor(std::span<const Tensor>)>;

// Two-loop-recursion L-BFGS with backtracking Armijo line search. Raises
// NonFiniteObjective when the objective is not finite at `init`; non-finite
// trial points during a line search are rejected like any failed trial.
LbfgsResult lbfgs_minimize(const Objective& objective, std::span<const Tensor> init,
                           const LbfgsConfig& config);

}  // namespace spin::ad

#endif  // SPIN_AUTODIFF_LBFGS_H_
