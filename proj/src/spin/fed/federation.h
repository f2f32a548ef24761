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

#ifndef SPIN_FED_FEDERATION_H_
#define SPIN_FED_FEDERATION_H_

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "spin/common/instrumentation.h"
#include "spin/data/dataset.h"
#include "spin/fed/aggregate.h"
#include "spin/fed/participant.h"
#include "spin/nn/model.h"

namespace spin::fed {

enum class InterceptionMode {
  kFirstGradient,  // the victim's first minibatch gradient of the round
  kModelDelta,     // (W_before - W_after) / assumed rate; approximate
};
std::string_view interception_mode_name(InterceptionMode mode);
InterceptionMode parse_interception_mode(std::string_view text);

// What the eavesdropper holds: the broadcast model W_i, the victim's
// gradient, and the victim batch size. Ground truth never travels here.
struct InterceptedUpdate {
  int victim = 0;
  int round = 0;
  nn::ModelState reference;
  nn::GradientVector gradient;
  std::size_t batch_size = 1;
  InterceptionMode mode = InterceptionMode::kFirstGradient;
};

struct AttackerContext {
  int round = 0;
  const nn::ModelState* global = nullptr;  // this round's broadcast
  std::span<const InterceptedUpdate> intercepts;
  bool active = false;  // a model submission is expected this round
};

// The adversarial participant. It sees every broadcast and every intercept
// and, when active, returns the model it submits for aggregation.
class AttackerParticipant {
 public:
  virtual ~AttackerParticipant() = default;
  virtual std::optional<nn::ModelState> on_round(const AttackerContext& ctx) = 0;
};

struct BenignParticipant {
  ParticipantConfig config;
  data::Dataset shard;
};

struct FederationConfig {
  AggregationMode mode = AggregationMode::kAverageModels;
  double global_rate = 1.0;  // step size for average-gradients mode
  int first_round = 1;
  int rounds = 100;          // rounds first_round .. first_round + rounds - 1
  int attack_start_round = 5;
  int attack_stop_round = 0;  // attacker leaves from this round on; 0 = never
  std::vector<int> victims;   // benign ids whose updates are intercepted
  InterceptionMode interception = InterceptionMode::kFirstGradient;
  double assumed_victim_rate = 0.05;  // model-delta interception only
  std::size_t threads = 1;
  std::size_t eval_batch = 250;
  Instrumentation* counters = nullptr;

  void validate() const;
};

struct RoundRecord {
  int round = 0;
  std::vector<double> participant_losses;  // benign in id order
  double accuracy = 0.0;
  double loss = 0.0;
  double seconds = 0.0;
  bool attacker_present = false;
};

struct Evaluation {
  double accuracy = 0.0;
  double loss = 0.0;
};

// Argmax with ties resolved to the lowest class index.
Evaluation evaluate(const nn::ModelState& model, const data::Dataset& test,
                    std::size_t batch = 250);

// Seed used by participant `cfg` for its local run in `round`.
std::uint64_t local_seed(const ParticipantConfig& cfg, int round);

using RoundCallback = std::function<void(const RoundRecord&, const nn::ModelState&)>;

// Synchronous rounds. Per round: benign participants train from the
// broadcast (in parallel, up to cfg.threads), intercepts are collected, the
// attacker (if any) is consulted, the submissions are aggregated and the
// result is evaluated. The attacker is included only in rounds where it is
// present. Failures are rethrown with the round and participant attached.
std::vector<RoundRecord> run_rounds(const nn::ModelState& global_init,
                                    const std::vector<BenignParticipant>& participants,
                                    AttackerParticipant* attacker, const FederationConfig& cfg,
                                    const data::Dataset& eval,
                                    const RoundCallback& on_round = {});

}  // namespace spin::fed

#endif  // SPIN_FED_FEDERATION_H_
