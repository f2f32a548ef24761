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

#include "spin/autodiff/lbfgs.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "spin/autodiff/backward.h"
#include "spin/common/error.h"

namespace spin::ad {

const char* stop_name(LbfgsStop stop) {
  switch (stop) {
    case LbfgsStop::kGradientTolerance: return "gradient-tolerance";
    case LbfgsStop::kLossTarget: return "loss-target";
    case LbfgsStop::kNoProgress: return "no-progress";
    case LbfgsStop::kMaxIterations: return "max-iterations";
    case LbfgsStop::kMaxEvaluations: return "max-evaluations";
    case LbfgsStop::kLineSearchFailed: return "line-search-failed";
  }
  return "unknown";
}

namespace {

using Flat = std::vector<double>;

double dot(const Flat& a, const Flat& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double inf_norm(const Flat& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

double l1_norm(const Flat& a) {
  double s = 0.0;
  for (double v : a) s += std::abs(v);
  return s;
}

struct CurvaturePair {
  Flat s;
  Flat y;
  double rho;
};

class Evaluator {
 public:
  Evaluator(const Objective& objective, std::span<const Tensor> init)
      : objective_(objective) {
    for (const Tensor& t : init) shapes_.push_back(t.shape());
  }

  std::vector<Tensor> unflatten(const Flat& x, bool as_leaves) const {
    std::vector<Tensor> out;
    std::size_t offset = 0;
    for (const Shape& shape : shapes_) {
      std::size_t n = numel(shape);
      Flat part(x.begin() + static_cast<std::ptrdiff_t>(offset),
                x.begin() + static_cast<std::ptrdiff_t>(offset + n));
      offset += n;
      out.push_back(as_leaves ? Tensor::leaf(shape, std::move(part))
                              : Tensor::constant(shape, std::move(part)));
    }
    return out;
  }

  // Returns +inf (and leaves g untouched) when the objective is not finite.
  double operator()(const Flat& x, Flat& g) {
    ++count_;
    std::vector<Tensor> leaves = unflatten(x, true);
    Tensor loss;
    std::vector<Tensor> grads;
    try {
      loss = objective_(leaves);
      grads = backward(loss, leaves, false);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kNonFiniteValue ||
          e.code() == ErrorCode::kNonFiniteObjective) {
        return std::numeric_limits<double>::infinity();
      }
      throw;
    }
    double f = loss.item();
    if (!std::isfinite(f)) return std::numeric_limits<double>::infinity();
    g.clear();
    for (const Tensor& t : grads) g.insert(g.end(), t.values().begin(), t.values().end());
    return f;
  }

  std::size_t count() const { return count_; }

 private:
  const Objective& objective_;
  std::vector<Shape> shapes_;
  std::size_t count_ = 0;
};

Flat two_loop(const Flat& g, const std::deque<CurvaturePair>& history) {
  Flat q = g;
  std::vector<double> alpha(history.size());
  for (std::size_t k = history.size(); k-- > 0;) {
    const auto& p = history[k];
    alpha[k] = p.rho * dot(p.s, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[k] * p.y[i];
  }
  if (!history.empty()) {
    const auto& newest = history.back();
    double gamma = dot(newest.s, newest.y) / dot(newest.y, newest.y);
    for (double& v : q) v *= gamma;
  }
  for (std::size_t k = 0; k < history.size(); ++k) {
    const auto& p = history[k];
    double beta = p.rho * dot(p.y, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += p.s[i] * (alpha[k] - beta);
  }
  for (double& v : q) v = -v;
  return q;
}

}  // namespace

LbfgsResult lbfgs_minimize(const Objective& objective, std::span<const Tensor> init,
                           const LbfgsConfig& config) {
  if (config.history_size < 1) {
    fail(ErrorCode::kInvalidArgument, "L-BFGS history size must be >= 1");
  }
  if (config.max_iterations < 1) {
    fail(ErrorCode::kInvalidArgument, "L-BFGS max iterations must be >= 1");
  }
  if (!(config.initial_step > 0.0) || !(config.contraction > 0.0 && config.contraction < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "L-BFGS step parameters out of range");
  }

  Flat x;
  for (const Tensor& t : init) x.insert(x.end(), t.values().begin(), t.values().end());
  for (double v : x) {
    if (!std::isfinite(v)) fail(ErrorCode::kNonFiniteObjective, "initial point is not finite");
  }

  Evaluator evaluate(objective, init);
  LbfgsResult result;
  Flat g;
  double f = evaluate(x, g);
  if (!std::isfinite(f)) {
    fail(ErrorCode::kNonFiniteObjective, "objective is not finite at the initial point");
  }
  result.initial_loss = f;
  result.trace.push_back({0, evaluate.count(), f});

  auto budget_left = [&] {
    return config.max_evaluations == 0 || evaluate.count() < config.max_evaluations;
  };

  std::deque<CurvaturePair> history;
  LbfgsStop stop = LbfgsStop::kMaxIterations;
  std::size_t iteration = 0;

  if (inf_norm(g) <= config.gradient_tolerance) {
    stop = LbfgsStop::kGradientTolerance;
  } else if (f <= config.loss_target) {
    stop = LbfgsStop::kLossTarget;
  } else {
    Flat x_new(x.size()), g_new;
    while (true) {
      if (iteration >= config.max_iterations) {
        stop = LbfgsStop::kMaxIterations;
        break;
      }
      Flat d = two_loop(g, history);
      double gtd = dot(g, d);
      if (!(gtd < 0.0)) {
        history.clear();
        d = g;
        for (double& v : d) v = -v;
        gtd = -dot(g, g);
      }
      double t = config.initial_step;
      if (history.empty()) t *= std::min(1.0, 1.0 / l1_norm(g));

      bool accepted = false;
      bool out_of_budget = false;
      double f_new = 0.0;
      for (std::size_t trial = 0; trial <= config.max_line_search_steps; ++trial) {
        if (!budget_left()) {
          out_of_budget = true;
          break;
        }
        for (std::size_t i = 0; i < x.size(); ++i) x_new[i] = x[i] + t * d[i];
        f_new = evaluate(x_new, g_new);
        if (f_new <= f + config.sufficient_decrease * t * gtd) {
          accepted = true;
          break;
        }
        t *= config.contraction;
      }
      if (out_of_budget) {
        stop = LbfgsStop::kMaxEvaluations;
        break;
      }
      if (!accepted) {
        result.line_search_failed = true;
        stop = LbfgsStop::kLineSearchFailed;
        break;
      }

      ++iteration;
      CurvaturePair pair;
      pair.s.resize(x.size());
      pair.y.resize(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        pair.s[i] = x_new[i] - x[i];
        pair.y[i] = g_new[i] - g[i];
      }
      double sy = dot(pair.s, pair.y);
      if (sy > 1e-10 * std::max(1e-300, dot(pair.y, pair.y)) && sy > 0.0) {
        pair.rho = 1.0 / sy;
        history.push_back(std::move(pair));
        if (history.size() > config.history_size) history.pop_front();
      }

      double decrease = f - f_new;
      x.swap(x_new);
      g.swap(g_new);
      f = f_new;
      result.trace.push_back({iteration, evaluate.count(), f});

      if (inf_norm(g) <= config.gradient_tolerance) {
        stop = LbfgsStop::kGradientTolerance;
        break;
      }
      if (f <= config.loss_target) {
        stop = LbfgsStop::kLossTarget;
        break;
      }
      if (decrease <= config.change_tolerance) {
        stop = LbfgsStop::kNoProgress;
        break;
      }
    }
  }

  result.arguments = evaluate.unflatten(x, false);
  result.final_loss = f;
  result.iterations = iteration;
  result.evaluations = evaluate.count();
  result.stop = stop;
  return result;
}

}  // namespace spin::ad
