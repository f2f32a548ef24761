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

#include "spin/experiments/scenario.h"

#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <numeric>

#include "spin/common/error.h"
#include "spin/common/rng.h"
#include "spin/data/io.h"
#include "spin/data/transforms.h"
#include "spin/experiments/manifest.h"
#include "spin/fed/metrics.h"
#include "spin/gan/attacker.h"
#include "spin/nn/checkpoint.h"
#include "spin/nn/model.h"

namespace spin::experiments {

namespace fs = std::filesystem;

std::uint64_t split_seed(const ScenarioConfig& cfg) { return derive_seed(cfg.master_seed, "split"); }
std::uint64_t partition_seed(const ScenarioConfig& cfg) { return derive_seed(cfg.master_seed, "partition"); }
std::uint64_t synth_seed(const ScenarioConfig& cfg) { return derive_seed(cfg.master_seed, "signs"); }
std::uint64_t global_init_seed(const ScenarioConfig& cfg) { return derive_seed(cfg.master_seed, "global-init"); }
std::uint64_t participant_seed(const ScenarioConfig& cfg, int id) {
  return derive_seed(cfg.master_seed, "participant", static_cast<std::uint64_t>(id));
}

ScenarioData prepare_data(const ScenarioConfig& cfg) {
  data::Dataset all;
  if (cfg.dataset == DatasetKind::kMnist) {
    all = data::load_idx(cfg.mnist_images, cfg.mnist_labels, 10, "mnist");
    if (cfg.mnist_limit > 0 && cfg.mnist_limit < all.size()) {
      std::vector<std::size_t> first(cfg.mnist_limit);
      std::iota(first.begin(), first.end(), std::size_t{0});
      all = all.subset(first, "mnist");
    }
    if (cfg.mnist_downsample) all = data::downsample_mnist(all);
  } else {
    data::SignSynthConfig s;
    s.count_per_class = cfg.signs_per_class;
    s.image_size = cfg.signs_size;
    s.noise = cfg.signs_noise;
    s.seed = synth_seed(cfg);
    all = data::synth_signs(s);
  }
  std::vector<double> ratios = {cfg.train_ratio, cfg.val_ratio, cfg.test_ratio};
  auto parts = data::split(all, ratios, split_seed(cfg));
  ScenarioData out;
  out.train = parts[0];
  out.val = parts[1];
  out.test = parts[2];
  if (out.train.size() < cfg.benign) {
    fail(ErrorCode::kInvalidConfig, "participants.benign: " + std::to_string(cfg.benign) +
                                        " participants but only " + std::to_string(out.train.size()) +
                                        " training examples");
  }
  out.shards = data::partition_for_participants(out.train, cfg.benign, partition_seed(cfg));
  return out;
}

nn::ArchitectureSpec scenario_architecture(const ScenarioConfig& cfg, const data::Dataset& train) {
  return nn::ArchitectureSpec::reference(cfg.architecture, train.shape(), train.classes());
}

namespace {

fs::path resolve_output(const ScenarioConfig& cfg, const ScenarioOptions& options) {
  fs::path out = cfg.output_dir;
  if (out.is_relative() && !options.output_root.empty()) out = options.output_root / out;
  return out;
}

std::unique_ptr<gan::SpinAttacker> make_attacker(const ScenarioConfig& cfg, const fs::path& out,
                                                 Instrumentation* counters) {
  if (cfg.arm == Arm::kBaseline) return nullptr;
  gan::AttackerConfig a;
  a.mode = cfg.arm == Arm::kSpin ? gan::AttackMode::kSpin : gan::AttackMode::kInversionOnly;
  int id = static_cast<int>(cfg.benign);
  a.participant = fed::ParticipantConfig::attacker(id, participant_seed(cfg, id));
  a.participant.learning_rate = cfg.attacker_learning_rate;
  a.participant.epochs = cfg.attacker_epochs;
  a.participant.decay_factor = cfg.attacker_decay_factor;
  a.participant.decay_period = cfg.attacker_decay_period;
  a.participant.batch_size = cfg.attacker_batch_size;

  a.inversion.restarts = cfg.inversion_restarts;
  a.inversion.max_evaluations = cfg.inversion_max_evaluations;
  a.inversion.history_size = cfg.inversion_history_size;
  a.inversion.initial_step = cfg.inversion_initial_step;
  a.inversion.batch_size = cfg.benign_batch_size;
  a.inversion.seed = derive_seed(cfg.master_seed, "inversion");
  a.inversion.threads = cfg.threads;
  a.inversion.counters = counters;

  a.gan.epochs = cfg.gan_epochs;
  a.gan.steps_per_epoch = cfg.gan_steps_per_epoch;
  a.gan.batch_size = cfg.gan_batch_size;
  a.gan.generator_rate = cfg.gan_generator_rate;
  a.gan.discriminator_rate = cfg.gan_discriminator_rate;
  a.gan.generator_loss = cfg.gan_generator_loss;
  a.gan.generator_optimizer = cfg.gan_generator_optimizer;
  a.gan.equilibrium_tolerance = cfg.gan_equilibrium_tolerance;
  a.gan.samples_per_class = cfg.gan_samples_per_class;
  a.gan.latent_dim = cfg.gan_latent_dim;
  a.gan.hidden = cfg.gan_hidden;
  a.gan.seed = derive_seed(cfg.master_seed, "gan");
  a.gan.counters = counters;

  a.invert_every_round = cfg.invert_every_round;
  if (cfg.dump_images) a.dump_dir = out / "attacker";
  a.counters = counters;
  return std::make_unique<gan::SpinAttacker>(std::move(a));
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) fail(ErrorCode::kIoError, "cannot write " + path.string());
  f << text;
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& input, const ScenarioOptions& options) {
  ScenarioConfig cfg = input;
  if (options.threads) cfg.threads = *options.threads;
  cfg.validate();

  ScenarioResult result;
  result.output_dir = resolve_output(cfg, options);
  fs::create_directories(result.output_dir);
  const fs::path& out = result.output_dir;
  std::string ini = cfg.to_ini();
  write_text(out / "config.ini", ini);
  RunManifest manifest(out, ini, cfg.name);
  manifest.begin();
  result.manifest = manifest.path();

  try {
    ScenarioData d = prepare_data(cfg);
    nn::ArchitectureSpec arch = scenario_architecture(cfg, d.train);
    nn::ModelState init = nn::ModelState::initialize(arch, global_init_seed(cfg));

    std::vector<fed::BenignParticipant> participants;
    for (std::size_t i = 0; i < cfg.benign; ++i) {
      int id = static_cast<int>(i);
      fed::ParticipantConfig p = fed::ParticipantConfig::benign(id, participant_seed(cfg, id));
      p.learning_rate = cfg.benign_learning_rate;
      p.epochs = cfg.benign_epochs;
      p.batch_size = cfg.benign_batch_size;
      participants.push_back({p, d.shards[i]});
    }
    auto attacker = make_attacker(cfg, out, options.counters);

    fed::FederationConfig f;
    f.mode = cfg.aggregation;
    f.global_rate = cfg.global_learning_rate;
    f.rounds = cfg.rounds;
    f.attack_start_round = cfg.attack_start_round;
    f.attack_stop_round = cfg.attack_stop_round;
    if (attacker) {
      for (std::size_t v = 0; v < cfg.victims; ++v) f.victims.push_back(static_cast<int>(v));
    }
    f.interception = cfg.interception;
    f.assumed_victim_rate = cfg.assumed_victim_rate;
    f.threads = cfg.threads;
    f.counters = options.counters;

    result.metrics = out / "metrics.csv";
    fed::MetricsWriter metrics(result.metrics, std::string(arm_name(cfg.arm)));
    if (cfg.checkpoints != CheckpointPolicy::kNone) fs::create_directories(out / "checkpoints");
    const int last_round = f.first_round + f.rounds - 1;
    std::map<std::string, std::string> meta = {{"scenario", cfg.name},
                                               {"arm", std::string(arm_name(cfg.arm))}};

    auto on_round = [&](const fed::RoundRecord& r, const nn::ModelState& global) {
      metrics.write(r);
      auto m = meta;
      m["round"] = std::to_string(r.round);
      if (cfg.checkpoints == CheckpointPolicy::kEveryRound) {
        char name[32];
        std::snprintf(name, sizeof name, "round_%03d.ckpt", r.round);
        nn::save_checkpoint(global, out / "checkpoints" / name, m);
      }
      if (cfg.checkpoints != CheckpointPolicy::kNone && r.round == last_round) {
        nn::save_checkpoint(global, out / "checkpoints" / "final.ckpt", m);
      }
      if (options.log) {
        char line[200];
        std::snprintf(line, sizeof line, "[%s] round %d/%d accuracy %.4f loss %.4f%s (%.1fs)\n",
                      cfg.name.c_str(), r.round, last_round, r.accuracy, r.loss,
                      r.attacker_present ? " attacker" : "", r.seconds);
        *options.log << line << std::flush;
      }
    };
    result.records = fed::run_rounds(init, participants, attacker.get(), f, d.test, on_round);
    result.final_accuracy = result.records.empty() ? 0.0 : result.records.back().accuracy;
  } catch (const Error& e) {
    manifest.finish(false, e.what());
    rethrow_with_context(e, "scenario " + cfg.name);
  } catch (const std::exception& e) {
    manifest.finish(false, e.what());
    throw;
  }
  manifest.finish(true);
  return result;
}

}  // namespace spin::experiments
