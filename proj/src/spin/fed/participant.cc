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

#include "spin/fed/participant.h"

#include <cmath>

#include "spin/common/error.h"
#include "spin/common/rng.h"

namespace spin::fed {

std::string_view role_name(Role role) {
  return role == Role::kBenign ? "benign" : "attacker";
}

ParticipantConfig ParticipantConfig::benign(int id, std::uint64_t seed) {
  ParticipantConfig c;
  c.id = id;
  c.seed = seed;
  return c;
}

ParticipantConfig ParticipantConfig::attacker(int id, std::uint64_t seed) {
  ParticipantConfig c;
  c.id = id;
  c.role = Role::kAttacker;
  c.learning_rate = 0.01;
  c.epochs = 10;
  c.decay_factor = 0.8;
  c.decay_period = 3;
  c.seed = seed;
  return c;
}

double ParticipantConfig::rate_at(std::size_t epoch) const {
  if (decay_period == 0) return learning_rate;
  return learning_rate * std::pow(decay_factor, static_cast<double>(epoch / decay_period));
}

void ParticipantConfig::validate() const {
  if (!(learning_rate > 0.0)) fail(ErrorCode::kInvalidConfig, "learning_rate must be positive");
  if (!(decay_factor > 0.0)) fail(ErrorCode::kInvalidConfig, "decay_factor must be positive");
  if (batch_size < 1) fail(ErrorCode::kInvalidConfig, "batch_size must be >= 1");
}

LocalTrainResult local_train(const nn::ModelState& model, const data::Dataset& shard,
                             const ParticipantConfig& cfg, const LocalTrainOptions& options) {
  cfg.validate();
  if (shard.empty()) fail(ErrorCode::kInvalidArgument, "participant " + std::to_string(cfg.id) + " has an empty shard");
  if (shard.shape() != model.architecture().input || shard.classes() != model.architecture().classes) {
    fail(ErrorCode::kShapeMismatch, "shard " + shard.name() + " does not match the model architecture");
  }
  bump(cfg.role == Role::kBenign ? &Instrumentation::benign_local_train
                                 : &Instrumentation::attacker_local_train,
       options.counters);

  LocalTrainResult out;
  out.model = model;
  Rng rng(cfg.seed);
  std::size_t n = shard.size();
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double rate = cfg.rate_at(epoch);
    std::vector<std::size_t> order = rng.permutation(n);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      std::size_t end = std::min(n, start + cfg.batch_size);
      std::span<const std::size_t> idx(order.data() + start, end - start);
      data::Batch batch = data::make_batch(shard, idx);
      nn::LossAndGradients lg = nn::loss_and_gradients(out.model, batch);
      if (options.capture_first_step && !out.first_step) {
        out.first_step = FirstStep{lg.gradients, batch};
      }
      out.model = nn::sgd_step(out.model, lg.gradients, rate);
      loss_sum += lg.loss;
      ++batches;
      ++out.steps;
    }
    out.last_epoch_loss = loss_sum / static_cast<double>(batches);
  }
  return out;
}

nn::ModelState local_train(const nn::ModelState& model, const data::Dataset& shard,
                           const ParticipantConfig& cfg) {
  return local_train(model, shard, cfg, {}).model;
}

}  // namespace spin::fed
