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

#ifndef SPIN_GAN_GAN_H_
#define SPIN_GAN_GAN_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "spin/autodiff/tensor.h"
#include "spin/common/instrumentation.h"
#include "spin/common/rng.h"
#include "spin/data/dataset.h"
#include "spin/fed/participant.h"
#include "spin/nn/model.h"

namespace spin::gan {

enum class GeneratorLoss { kSaturating, kNonSaturating };
std::string_view generator_loss_name(GeneratorLoss loss);
GeneratorLoss parse_generator_loss(std::string_view text);

enum class GeneratorOptimizer { kSgd, kAdam };
std::string_view generator_optimizer_name(GeneratorOptimizer opt);
GeneratorOptimizer parse_generator_optimizer(std::string_view text);

// affine(latent -> hidden) -> sigmoid -> affine(hidden -> H*W*C) -> sigmoid.
class GeneratorState {
 public:
  GeneratorState() = default;
  GeneratorState(data::ImageShape image, std::size_t latent_dim, std::size_t hidden,
                 std::vector<ad::Tensor> parameters);
  static GeneratorState initialize(data::ImageShape image, std::uint64_t seed,
                                   std::size_t latent_dim = 64, std::size_t hidden = 256);

  const data::ImageShape& image() const { return image_; }
  std::size_t latent_dim() const { return latent_dim_; }
  std::size_t hidden() const { return hidden_; }
  const std::vector<ad::Tensor>& parameters() const { return params_; }
  std::uint64_t step() const { return step_; }

  // (B, H, W, C) images for (B, latent) latents.
  ad::Tensor generate(std::span<const ad::Tensor> params, const ad::Tensor& latents) const;
  ad::Tensor generate(const ad::Tensor& latents) const { return generate(params_, latents); }

  GeneratorState updated(std::span<const ad::Tensor> grads, double rate, GeneratorOptimizer opt) const;

 private:
  data::ImageShape image_;
  std::size_t latent_dim_ = 0;
  std::size_t hidden_ = 0;
  std::vector<ad::Tensor> params_;
  // Adam moments.
  std::vector<std::vector<double>> m_, v_;
  std::uint64_t step_ = 0;
};

// The global classifier with one extra "fake" output computed from the
// classifier's penultimate features. D(x) = 1 - softmax(C+1 logits)[fake].
struct DiscriminatorState {
  nn::ModelState classifier;
  ad::Tensor fake_weight;  // (feature_width, 1)
  ad::Tensor fake_bias;    // (1)

  std::vector<ad::Tensor> parameters() const;
};

// First C outputs copied from `global` bit-exactly; the fake unit is taken
// from `prior` when given, else seeded Glorot weights and a zero bias.
DiscriminatorState refresh_discriminator(const nn::ModelState& global,
                                         const std::optional<DiscriminatorState>& prior,
                                         std::uint64_t seed);

struct DiscriminatorOutput {
  ad::Tensor class_logits;  // (B, C)
  ad::Tensor log_real;      // (B, 1) log D(x)
  ad::Tensor log_fake;      // (B, 1) log (1 - D(x))
};

// Evaluated in log space: log D = lse(class logits) - lse(all C+1 logits),
// log(1 - D) = fake logit - lse(all C+1 logits).
DiscriminatorOutput discriminate(const nn::ArchitectureSpec& arch,
                                 std::span<const ad::Tensor> disc_params, const ad::Tensor& x);
DiscriminatorOutput discriminate(const DiscriminatorState& disc, const ad::Tensor& x);

// Value of the minimax objective: mean log D(real) + mean log(1 - D(fake)).
ad::Tensor gan_value(const ad::Tensor& log_real_on_real, const ad::Tensor& log_fake_on_fake);

struct GanTrainConfig {
  std::size_t epochs = 10;
  std::size_t steps_per_epoch = 20;
  std::size_t batch_size = 16;  // real and fake examples per step
  double generator_rate = 0.01;
  double discriminator_rate = 0.01;
  GeneratorLoss generator_loss = GeneratorLoss::kSaturating;
  GeneratorOptimizer generator_optimizer = GeneratorOptimizer::kAdam;
  double equilibrium_tolerance = 0.05;
  std::size_t samples_per_class = 50;
  std::size_t latent_dim = 64;
  std::size_t hidden = 256;
  std::uint64_t seed = 0;
  Instrumentation* counters = nullptr;

  void validate() const;
};

struct GanLosses {
  double d_loss = 0.0;  // -(value) before the step
  double g_loss = 0.0;  // generator objective before the step
  double rho = 0.0;     // value before the step
};

struct GanStepResult {
  GeneratorState generator;
  DiscriminatorState discriminator;
  GanLosses losses;
};

// One discriminator ascent step on the value, then one generator step on
// the selected generator loss, both from the same latent draw.
GanStepResult gan_step(const GeneratorState& gen, const DiscriminatorState& disc,
                       const data::Batch& real, const GanTrainConfig& cfg, Rng& rng);

// `count` generator samples tagged `poisoned`, labels unset.
data::Dataset sample_generator(const GeneratorState& gen, std::size_t count, std::uint64_t seed,
                               std::size_t classes);

// Cyclic relabel (l + 1) mod C.
int flip_label(int label, std::size_t classes);

struct GanTraceRow {
  std::size_t epoch = 0;
  std::size_t step = 0;
  GanLosses losses;
};

// Generator and fake unit persist across rounds; the classifier part of the
// discriminator is re-copied from every global model.
struct GanState {
  GeneratorState generator;
  std::optional<DiscriminatorState> discriminator;
};

struct PoisonResult {
  nn::ModelState model;
  data::Dataset poisoned;
  std::vector<int> source_labels;
  std::size_t epochs_run = 0;
  bool equilibrium_reached = false;
  std::vector<GanTraceRow> trace;
};

// Algorithm: for each epoch, refresh D from `global`, run steps_per_epoch
// GAN steps on reconstruction batches; stop early once |rho - 2 log 0.5| <
// tolerance for 3 consecutive epochs. Then sample samples_per_class * C
// images, take each one's source label from D's class logits, relabel with
// flip_label and train a copy of `global` on them with the attacker's
// schedule.
PoisonResult produce_poisoned_model(const nn::ModelState& global, const data::Dataset& reconstructions,
                                    GanState& state, const GanTrainConfig& cfg,
                                    const fed::ParticipantConfig& attacker_cfg);

void write_gan_trace_csv(const std::vector<GanTraceRow>& trace, const std::filesystem::path& path,
                         bool append = false);

}  // namespace spin::gan

#endif  // SPIN_GAN_GAN_H_
