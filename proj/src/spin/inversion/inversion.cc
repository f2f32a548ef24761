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

#include "spin/inversion/inversion.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "spin/autodiff/backward.h"
#include "spin/autodiff/lbfgs.h"
#include "spin/autodiff/ops.h"
#include "spin/common/error.h"
#include "spin/common/parallel.h"
#include "spin/common/rng.h"
#include "spin/data/io.h"

namespace spin::inversion {

void InversionConfig::validate() const {
  if (restarts < 1) fail(ErrorCode::kInvalidConfig, "inversion restarts must be >= 1");
  if (max_evaluations < 1) fail(ErrorCode::kInvalidConfig, "inversion max_evaluations must be >= 1");
  if (history_size < 1) fail(ErrorCode::kInvalidConfig, "inversion history_size must be >= 1");
  if (!(initial_step > 0.0)) fail(ErrorCode::kInvalidConfig, "inversion initial_step must be positive");
  if (batch_size < 1) fail(ErrorCode::kInvalidConfig, "inversion batch_size must be >= 1");
}

nn::GradientVector dummy_gradients(const nn::ModelState& model, const DummyPair& dummy) {
  const nn::ArchitectureSpec& arch = model.architecture();
  ad::Tensor x = dummy.pixels.on_graph() ? dummy.pixels : dummy.pixels.as_leaf();
  ad::Tensor y = dummy.label_logits.on_graph() ? dummy.label_logits : dummy.label_logits.as_leaf();
  if (y.rank() != 2 || x.rank() != 4 || y.dim(0) != x.dim(0) || y.dim(1) != arch.classes) {
    fail(ErrorCode::kShapeMismatch, "dummy pixels " + ad::shape_str(x.shape()) +
                                        " and label logits " + ad::shape_str(y.shape()) +
                                        " do not fit the model");
  }
  std::vector<ad::Tensor> params = model.leaves();
  ad::Tensor logits = nn::forward_logits(arch, params, x);
  ad::Tensor loss = nn::cross_entropy_loss(logits, ad::softmax(y));
  std::vector<ad::Tensor> grads = ad::backward(loss, params, /*create_graph=*/true);
  nn::GradientVector out;
  for (std::size_t i = 0; i < grads.size(); ++i) {
    out.entries.push_back({model.parameters()[i].name, grads[i]});
  }
  return out;
}

ad::Tensor matching_loss(const nn::GradientVector& dummy, const nn::GradientVector& target) {
  if (!dummy.congruent_with(target)) {
    fail(ErrorCode::kShapeMismatch, "dummy and target gradients are not congruent");
  }
  ad::Tensor total;
  for (std::size_t i = 0; i < dummy.entries.size(); ++i) {
    ad::Tensor term = ad::sum(ad::square(ad::sub(dummy.entries[i].value, target.entries[i].value.detach())));
    total = total.defined() ? ad::add(total, term) : term;
  }
  if (!total.defined()) fail(ErrorCode::kShapeMismatch, "empty gradient");
  return total;
}

DummyPair random_dummy(const nn::ArchitectureSpec& arch, std::size_t batch, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> px(batch * arch.input.size());
  for (double& v : px) v = rng.normal();
  std::vector<double> logits(batch * arch.classes);
  for (double& v : logits) v = rng.normal();
  return {ad::Tensor::constant({batch, arch.input.height, arch.input.width, arch.input.channels}, std::move(px)),
          ad::Tensor::constant({batch, arch.classes}, std::move(logits))};
}

namespace {

struct RestartRun {
  RestartSummary summary;
  ad::LbfgsResult result;
};

std::vector<int> argmax_rows(const ad::Tensor& t) {
  std::size_t rows = t.dim(0), cols = t.dim(1);
  std::vector<int> out(rows);
  auto v = t.values();
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < cols; ++c) {
      if (v[r * cols + c] > v[r * cols + best]) best = c;
    }
    out[r] = static_cast<int>(best);
  }
  return out;
}

}  // namespace

ReconstructionResult invert(const fed::InterceptedUpdate& update, const InversionConfig& cfg,
                            const std::optional<DummyPair>& init) {
  cfg.validate();
  const nn::ModelState& model = update.reference;
  const nn::ArchitectureSpec& arch = model.architecture();
  if (!update.gradient.congruent_with(model)) {
    fail(ErrorCode::kShapeMismatch, "intercepted gradient is not congruent with the reference model");
  }
  if (update.batch_size != cfg.batch_size) {
    fail(ErrorCode::kInvalidConfig, "inversion batch_size " + std::to_string(cfg.batch_size) +
                                        " does not match the victim batch size " +
                                        std::to_string(update.batch_size));
  }
  bump(&Instrumentation::inversions, cfg.counters);
  nn::GradientVector target = update.gradient.detached();

  ad::LbfgsConfig lc;
  lc.history_size = cfg.history_size;
  lc.max_iterations = cfg.max_evaluations;
  lc.max_evaluations = cfg.max_evaluations;
  lc.initial_step = cfg.initial_step;
  lc.loss_target = cfg.loss_target;

  ad::Objective objective = [&](std::span<const ad::Tensor> args) {
    return matching_loss(dummy_gradients(model, {args[0], args[1]}), target);
  };

  std::vector<RestartRun> runs(cfg.restarts);
  parallel_for(cfg.restarts, cfg.threads, [&](std::size_t r) {
    DummyPair start = init ? *init : random_dummy(arch, cfg.batch_size, derive_seed(cfg.seed, "inversion-restart", r));
    std::vector<ad::Tensor> args{start.pixels.detach(), start.label_logits.detach()};
    RestartRun& run = runs[r];
    run.summary.restart = r;
    try {
      run.result = ad::lbfgs_minimize(objective, args, lc);
      run.summary.initial_loss = run.result.initial_loss;
      run.summary.final_loss = run.result.final_loss;
      run.summary.evaluations = run.result.evaluations;
      run.summary.stop = ad::stop_name(run.result.stop);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNonFiniteObjective && e.code() != ErrorCode::kNonFiniteValue) throw;
      run.summary.diverged = true;
      run.summary.stop = "diverged";
    }
  });

  ReconstructionResult out;
  std::optional<std::size_t> best;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    out.restarts.push_back(runs[r].summary);
    if (runs[r].summary.diverged) continue;
    for (const auto& p : runs[r].result.trace) out.trace.push_back({r, p.iteration, p.loss});
    if (!best || runs[r].summary.final_loss < runs[*best].summary.final_loss) best = r;
  }
  out.restarts_used = runs.size();
  if (!best) {
    fail(ErrorCode::kAllRestartsDiverged, "all " + std::to_string(runs.size()) +
                                              " restarts had a non-finite objective");
  }
  const ad::LbfgsResult& res = runs[*best].result;
  out.best_restart = *best;
  out.matching_loss = res.final_loss;
  out.pixels = res.arguments[0];
  out.soft_labels = ad::softmax(res.arguments[1]);
  out.labels = argmax_rows(out.soft_labels);
  return out;
}

data::Dataset to_dataset(const ReconstructionResult& result, const nn::ArchitectureSpec& arch,
                         std::string name, std::uint64_t first_id) {
  std::size_t per = arch.input.size();
  auto v = result.pixels.values();
  std::vector<data::Example> ex;
  for (std::size_t b = 0; b < result.labels.size(); ++b) {
    std::vector<double> px(per);
    for (std::size_t i = 0; i < per; ++i) px[i] = std::clamp(v[b * per + i], 0.0, 1.0);
    ex.push_back(data::make_example(first_id + b, std::move(px), result.labels[b],
                                    data::Provenance::kReconstructed));
  }
  return data::Dataset(std::move(name), arch.classes, arch.input, std::move(ex), data::SplitTag::kAll,
                       "inversion");
}

std::vector<std::filesystem::path> export_reconstruction(const ReconstructionResult& result,
                                                         const nn::ArchitectureSpec& arch,
                                                         const std::filesystem::path& dir,
                                                         int round) {
  return data::export_pgm(to_dataset(result, arch, "reconstruction"), dir, round);
}

void write_trace_csv(const ReconstructionResult& result, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::kIoError, "cannot write " + path.string());
  out << "restart,iteration,matching_loss\n";
  char buf[96];
  for (const auto& row : result.trace) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.9e\n", row.restart, row.iteration, row.matching_loss);
    out << buf;
  }
  if (!out) fail(ErrorCode::kIoError, "cannot write " + path.string());
}

double pixel_mse(const ad::Tensor& reconstruction, const ad::Tensor& truth) {
  if (reconstruction.numel() != truth.numel()) {
    fail(ErrorCode::kShapeMismatch, "reconstruction and truth differ in size");
  }
  auto a = reconstruction.values(), b = truth.values();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = std::clamp(a[i], 0.0, 1.0) - b[i];
    s += d * d;
  }
  return s / static_cast<double>(a.size());
}

}  // namespace spin::inversion
