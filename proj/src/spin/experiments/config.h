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

#ifndef SPIN_EXPERIMENTS_CONFIG_H_
#define SPIN_EXPERIMENTS_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spin/fed/aggregate.h"
#include "spin/fed/federation.h"
#include "spin/gan/gan.h"

namespace spin::experiments {

enum class Arm { kBaseline, kInversionOnly, kSpin };
std::string_view arm_name(Arm arm);

enum class DatasetKind { kMnist, kSigns };
std::string_view dataset_name(DatasetKind kind);

enum class CheckpointPolicy { kNone, kFinal, kEveryRound };

// Everything a run needs. Field names mirror the INI keys "[section] key".
struct ScenarioConfig {
  // [scenario]
  std::string name = "scenario";
  Arm arm = Arm::kBaseline;
  DatasetKind dataset = DatasetKind::kMnist;
  std::uint64_t master_seed = 1;
  int rounds = 30;
  std::string output_dir = "runs/scenario";
  std::size_t threads = 1;

  // [data]
  std::filesystem::path mnist_images;
  std::filesystem::path mnist_labels;
  bool mnist_downsample = true;
  std::size_t mnist_limit = 0;  // 0 = all examples
  double train_ratio = 0.4;
  double val_ratio = 0.5;
  double test_ratio = 0.1;
  std::size_t signs_per_class = 300;
  std::size_t signs_size = 16;
  double signs_noise = 0.3;

  // [model]
  std::string architecture = "conv-s";

  // [participants]
  std::size_t benign = 9;
  std::size_t attackers = 0;
  double benign_learning_rate = 0.05;
  std::size_t benign_epochs = 4;
  std::size_t benign_batch_size = 1;
  double attacker_learning_rate = 0.01;
  std::size_t attacker_epochs = 10;
  double attacker_decay_factor = 0.8;
  std::size_t attacker_decay_period = 3;
  std::size_t attacker_batch_size = 1;

  // [aggregation]
  fed::AggregationMode aggregation = fed::AggregationMode::kAverageModels;
  double global_learning_rate = 1.0;

  // [attack]
  int attack_start_round = 5;
  int attack_stop_round = 0;
  std::size_t victims = 3;
  fed::InterceptionMode interception = fed::InterceptionMode::kFirstGradient;
  double assumed_victim_rate = 0.05;
  bool invert_every_round = false;

  // [inversion]
  std::size_t inversion_restarts = 10;
  std::size_t inversion_max_evaluations = 1000;
  std::size_t inversion_history_size = 100;
  double inversion_initial_step = 0.5;

  // [gan]
  std::size_t gan_epochs = 10;
  std::size_t gan_steps_per_epoch = 20;
  std::size_t gan_batch_size = 16;
  double gan_generator_rate = 0.01;
  double gan_discriminator_rate = 0.01;
  gan::GeneratorLoss gan_generator_loss = gan::GeneratorLoss::kSaturating;
  gan::GeneratorOptimizer gan_generator_optimizer = gan::GeneratorOptimizer::kAdam;
  double gan_equilibrium_tolerance = 0.05;
  std::size_t gan_samples_per_class = 50;
  std::size_t gan_latent_dim = 64;
  std::size_t gan_hidden = 256;

  // [output]
  bool dump_images = true;
  CheckpointPolicy checkpoints = CheckpointPolicy::kFinal;

  // Directory relative data paths are resolved against.
  std::filesystem::path base_dir;

  // Raises InvalidConfig listing every violated constraint, one per line.
  void validate() const;
  // Resolved configuration in the INI format accepted by parse_config.
  std::string to_ini() const;
};

// "section.key" = "value" pairs applied after the file.
using ConfigOverrides = std::vector<std::pair<std::string, std::string>>;

// Parses the INI text. Unknown sections or keys and malformed values are
// reported together with constraint violations in one InvalidConfig.
ScenarioConfig parse_config(std::string_view text, const std::filesystem::path& base_dir,
                            const ConfigOverrides& overrides = {});
ScenarioConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});

// Every known key as "section.key", in file order.
std::vector<std::string> config_keys();

}  // namespace spin::experiments

#endif  // SPIN_EXPERIMENTS_CONFIG_H_
