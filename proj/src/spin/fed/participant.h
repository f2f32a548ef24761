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

#ifndef SPIN_FED_PARTICIPANT_H_
#define SPIN_FED_PARTICIPANT_H_

#include <cstdint>
#include <optional>
#include <string_view>

#include "spin/common/instrumentation.h"
#include "spin/data/dataset.h"
#include "spin/nn/model.h"

namespace spin::fed {

enum class Role { kBenign, kAttacker };
std::string_view role_name(Role role);

struct ParticipantConfig {
  int id = 0;
  Role role = Role::kBenign;
  double learning_rate = 0.05;
  std::size_t epochs = 4;
  double decay_factor = 1.0;
  std::size_t decay_period = 0;  // 0 disables decay
  std::size_t batch_size = 1;
  std::uint64_t seed = 0;

  // 0.05 for 4 epochs, no decay.
  static ParticipantConfig benign(int id, std::uint64_t seed);
  // 0.01 for 10 epochs, rate x0.8 after every 3 epochs.
  static ParticipantConfig attacker(int id, std::uint64_t seed);

  // Learning rate used throughout epoch `epoch` (0-based).
  double rate_at(std::size_t epoch) const;
  void validate() const;
};

// Gradient of the first minibatch of a local run, taken at the incoming
// model. This is what an eavesdropper on a gradient-sharing link observes.
struct FirstStep {
  nn::GradientVector gradient;
  data::Batch batch;
};

struct LocalTrainResult {
  nn::ModelState model;
  double last_epoch_loss = 0.0;  // mean minibatch loss over the final epoch
  std::size_t steps = 0;
  std::optional<FirstStep> first_step;
};

struct LocalTrainOptions {
  bool capture_first_step = false;
  Instrumentation* counters = nullptr;
};

// cfg.epochs passes of shuffled minibatch SGD (the final partial batch is
// kept). The shuffle stream is seeded by cfg.seed.
LocalTrainResult local_train(const nn::ModelState& model, const data::Dataset& shard,
                             const ParticipantConfig& cfg, const LocalTrainOptions& options);
nn::ModelState local_train(const nn::ModelState& model, const data::Dataset& shard,
                           const ParticipantConfig& cfg);

}  // namespace spin::fed

#endif  // SPIN_FED_PARTICIPANT_H_
