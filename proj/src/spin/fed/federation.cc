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

#include "spin/fed/federation.h"

#include <chrono>
#include <cmath>

#include "spin/autodiff/ops.h"
#include "spin/common/error.h"
#include "spin/common/parallel.h"
#include "spin/common/rng.h"

namespace spin::fed {

std::string_view interception_mode_name(InterceptionMode mode) {
  return mode == InterceptionMode::kFirstGradient ? "first-gradient" : "model-delta";
}

InterceptionMode parse_interception_mode(std::string_view text) {
  if (text == "first-gradient") return InterceptionMode::kFirstGradient;
  if (text == "model-delta") return InterceptionMode::kModelDelta;
  fail(ErrorCode::kInvalidConfig, "interception must be first-gradient or model-delta, got '" +
                                      std::string(text) + "'");
}

void FederationConfig::validate() const {
  if (rounds < 1) fail(ErrorCode::kInvalidConfig, "rounds must be >= 1");
  if (first_round < 1) fail(ErrorCode::kInvalidConfig, "first_round must be >= 1");
  if (!(global_rate > 0.0)) fail(ErrorCode::kInvalidConfig, "global_rate must be positive");
  if (!(assumed_victim_rate > 0.0)) fail(ErrorCode::kInvalidConfig, "assumed_victim_rate must be positive");
  if (eval_batch < 1) fail(ErrorCode::kInvalidConfig, "eval_batch must be >= 1");
}

Evaluation evaluate(const nn::ModelState& model, const data::Dataset& test, std::size_t batch) {
  if (test.empty()) fail(ErrorCode::kInvalidArgument, "empty evaluation set");
  if (test.shape() != model.architecture().input) {
    fail(ErrorCode::kShapeMismatch, "evaluation set " + test.name() + " does not match the model input");
  }
  std::size_t n = test.size(), classes = model.architecture().classes;
  std::size_t correct = 0;
  double loss_sum = 0.0;
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < n; start += batch) {
    std::size_t end = std::min(n, start + batch);
    idx.resize(end - start);
    for (std::size_t i = start; i < end; ++i) idx[i - start] = i;
    data::Batch b = data::make_batch(test, idx);
    ad::Tensor logits = nn::forward(model, b);
    auto z = logits.values();
    for (std::size_t r = 0; r < idx.size(); ++r) {
      std::size_t best = 0;
      for (std::size_t c = 1; c < classes; ++c) {
        if (z[r * classes + c] > z[r * classes + best]) best = c;
      }
      correct += static_cast<int>(best) == b.labels[r];
    }
    loss_sum += nn::cross_entropy_loss(logits, b.labels).item() * static_cast<double>(idx.size());
  }
  return {static_cast<double>(correct) / static_cast<double>(n), loss_sum / static_cast<double>(n)};
}

std::uint64_t local_seed(const ParticipantConfig& cfg, int round) {
  return derive_seed(cfg.seed, "local-train", static_cast<std::uint64_t>(round));
}

namespace {

struct BenignOutcome {
  nn::ModelState model;
  nn::GradientVector gradient;  // average-gradients mode
  double loss = 0.0;
  std::optional<InterceptedUpdate> intercept;
};

bool is_victim(const FederationConfig& cfg, int id) {
  return std::find(cfg.victims.begin(), cfg.victims.end(), id) != cfg.victims.end();
}

nn::GradientVector model_delta(const nn::ModelState& before, const nn::ModelState& after, double rate) {
  nn::GradientVector g;
  for (std::size_t p = 0; p < before.parameters().size(); ++p) {
    const auto& w0 = before.parameters()[p];
    auto a = w0.value.values(), b = after.parameters()[p].value.values();
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v[i] = (a[i] - b[i]) / rate;
    g.entries.push_back({w0.name, ad::Tensor::constant(w0.value.shape(), std::move(v))});
  }
  return g;
}

BenignOutcome run_benign(const nn::ModelState& global, const BenignParticipant& p,
                         const FederationConfig& cfg, int round, bool intercept) {
  ParticipantConfig pc = p.config;
  pc.seed = local_seed(p.config, round);
  BenignOutcome out;
  if (cfg.mode == AggregationMode::kAverageGradients) {
    // One sampled minibatch gradient at the broadcast model.
    Rng rng(pc.seed);
    std::vector<std::size_t> order = rng.permutation(p.shard.size());
    order.resize(std::min(pc.batch_size, order.size()));
    data::Batch batch = data::make_batch(p.shard, order);
    bump(&Instrumentation::benign_local_train, cfg.counters);
    nn::LossAndGradients lg = nn::loss_and_gradients(global, batch);
    out.gradient = lg.gradients;
    out.loss = lg.loss;
    out.model = global;
    if (intercept) {
      out.intercept = InterceptedUpdate{pc.id, round, global, lg.gradients, batch.size(),
                                        InterceptionMode::kFirstGradient};
    }
    return out;
  }
  LocalTrainOptions opts;
  opts.capture_first_step = intercept && cfg.interception == InterceptionMode::kFirstGradient;
  opts.counters = cfg.counters;
  LocalTrainResult r = local_train(global, p.shard, pc, opts);
  out.loss = r.last_epoch_loss;
  if (intercept) {
    InterceptedUpdate u;
    u.victim = pc.id;
    u.round = round;
    u.reference = global;
    u.mode = cfg.interception;
    if (cfg.interception == InterceptionMode::kFirstGradient) {
      u.gradient = r.first_step->gradient;
      u.batch_size = r.first_step->batch.size();
    } else {
      u.gradient = model_delta(global, r.model, cfg.assumed_victim_rate);
      u.batch_size = pc.batch_size;
    }
    out.intercept = std::move(u);
  }
  out.model = std::move(r.model);
  return out;
}

nn::GradientVector pseudo_gradient(const nn::ModelState& global, const nn::ModelState& submitted,
                                   double rate) {
  return model_delta(global, submitted, rate);
}

}  // namespace

std::vector<RoundRecord> run_rounds(const nn::ModelState& global_init,
                                    const std::vector<BenignParticipant>& participants,
                                    AttackerParticipant* attacker, const FederationConfig& cfg,
                                    const data::Dataset& eval, const RoundCallback& on_round) {
  cfg.validate();
  if (participants.empty()) fail(ErrorCode::kInvalidArgument, "no benign participants");
  if (eval.empty()) fail(ErrorCode::kInvalidArgument, "empty evaluation set");

  std::vector<RoundRecord> records;
  nn::ModelState global = global_init;
  for (int round = cfg.first_round; round < cfg.first_round + cfg.rounds; ++round) {
    auto started = std::chrono::steady_clock::now();
    bool present = attacker != nullptr && round >= cfg.attack_start_round &&
                   (cfg.attack_stop_round == 0 || round < cfg.attack_stop_round);

    std::vector<BenignOutcome> outcomes(participants.size());
    parallel_for(participants.size(), cfg.threads, [&](std::size_t i) {
      const BenignParticipant& p = participants[i];
      try {
        outcomes[i] = run_benign(global, p, cfg, round, attacker != nullptr && is_victim(cfg, p.config.id));
      } catch (const Error& e) {
        rethrow_with_context(e, "round " + std::to_string(round) + ", participant " +
                                    std::to_string(p.config.id));
      }
    });

    std::vector<InterceptedUpdate> intercepts;
    for (auto& o : outcomes) {
      if (o.intercept) {
        intercepts.push_back(std::move(*o.intercept));
        bump(&Instrumentation::intercepts, cfg.counters);
      }
    }

    std::optional<nn::ModelState> submitted;
    if (attacker != nullptr) {
      AttackerContext ctx{round, &global, intercepts, present};
      try {
        submitted = attacker->on_round(ctx);
      } catch (const Error& e) {
        rethrow_with_context(e, "round " + std::to_string(round) + ", attacker");
      }
      if (present && !submitted) {
        fail(ErrorCode::kInvalidArgument, "round " + std::to_string(round) + ": attacker submitted no model");
      }
      if (!present) submitted.reset();
    }

    bump(&Instrumentation::aggregations, cfg.counters);
    nn::ModelState next;
    if (cfg.mode == AggregationMode::kAverageModels) {
      std::vector<nn::ModelState> models;
      for (auto& o : outcomes) models.push_back(o.model);
      if (submitted) models.push_back(*submitted);
      next = aggregate_models(models);
    } else {
      std::vector<nn::GradientVector> grads;
      for (auto& o : outcomes) grads.push_back(o.gradient);
      if (submitted) grads.push_back(pseudo_gradient(global, *submitted, cfg.global_rate));
      next = aggregate_gradients(global, grads, cfg.global_rate);
    }
    global = std::move(next);

    RoundRecord rec;
    rec.round = round;
    for (auto& o : outcomes) rec.participant_losses.push_back(o.loss);
    Evaluation ev = evaluate(global, eval, cfg.eval_batch);
    rec.accuracy = ev.accuracy;
    rec.loss = ev.loss;
    rec.attacker_present = present;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (on_round) on_round(rec, global);
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace spin::fed
