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

#ifndef SPIN_GAN_ATTACKER_H_
#define SPIN_GAN_ATTACKER_H_

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "spin/fed/federation.h"
#include "spin/gan/gan.h"
#include "spin/inversion/inversion.h"

namespace spin::gan {

enum class AttackMode {
  kInversionOnly,  // trains on reconstructions with their recovered labels
  kSpin,           // inversion, GAN, label flip, poisoned training
};
std::string_view attack_mode_name(AttackMode mode);

struct AttackerConfig {
  AttackMode mode = AttackMode::kSpin;
  fed::ParticipantConfig participant = fed::ParticipantConfig::attacker(-1, 0);
  inversion::InversionConfig inversion;
  GanTrainConfig gan;
  // Invert intercepts in every round instead of only in rounds where the
  // attacker is not yet submitting.
  bool invert_every_round = false;
  // Output directory for reconstruction/poison dumps and traces; empty
  // disables them.
  std::filesystem::path dump_dir;
  Instrumentation* counters = nullptr;
};

// The adversarial participant of the inversion-only and SPIN arms. It
// inverts intercepted updates into a growing reconstruction set and, once
// active, submits a model trained on it (inversion-only) or on GAN samples
// with flipped labels (SPIN).
class SpinAttacker : public fed::AttackerParticipant {
 public:
  explicit SpinAttacker(AttackerConfig cfg);

  std::optional<nn::ModelState> on_round(const fed::AttackerContext& ctx) override;

  const std::optional<data::Dataset>& reconstructions() const { return reconstructions_; }
  // Reconstruction quality against ground truth is not known to the
  // attacker; the harness may look it up by (round, victim) here.
  struct InversionLog {
    int round;
    int victim;
    double matching_loss;
    std::vector<int> labels;
    ad::Tensor pixels;
  };
  const std::vector<InversionLog>& inversion_log() const { return log_; }

 private:
  void absorb(const fed::InterceptedUpdate& update);

  AttackerConfig cfg_;
  std::optional<data::Dataset> reconstructions_;
  std::vector<InversionLog> log_;
  GanState gan_;
  bool trace_started_ = false;
};

}  // namespace spin::gan

#endif  // SPIN_GAN_ATTACKER_H_
