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

#ifndef SPIN_EXPERIMENTS_SCENARIO_H_
#define SPIN_EXPERIMENTS_SCENARIO_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include "spin/common/instrumentation.h"
#include "spin/data/dataset.h"
#include "spin/experiments/config.h"
#include "spin/fed/federation.h"
#include "spin/nn/architecture.h"

namespace spin::experiments {

// Seeds of a scenario, all derived from the master seed.
std::uint64_t split_seed(const ScenarioConfig& cfg);
std::uint64_t partition_seed(const ScenarioConfig& cfg);
std::uint64_t synth_seed(const ScenarioConfig& cfg);
std::uint64_t global_init_seed(const ScenarioConfig& cfg);
std::uint64_t participant_seed(const ScenarioConfig& cfg, int id);

struct ScenarioData {
  data::Dataset train;
  data::Dataset val;
  data::Dataset test;
  std::vector<data::Dataset> shards;  // one per benign participant
};

// Loads (mnist) or synthesizes (signs) the data, splits it and partitions
// the training part across the benign participants.
ScenarioData prepare_data(const ScenarioConfig& cfg);

nn::ArchitectureSpec scenario_architecture(const ScenarioConfig& cfg, const data::Dataset& train);

struct ScenarioOptions {
  // Root for a relative output_dir; empty means the working directory.
  std::filesystem::path output_root;
  std::optional<std::size_t> threads;
  Instrumentation* counters = nullptr;
  std::ostream* log = nullptr;  // one progress line per round
};

struct ScenarioResult {
  std::filesystem::path output_dir;
  std::filesystem::path metrics;
  std::filesystem::path manifest;
  std::vector<fed::RoundRecord> records;
  double final_accuracy = 0.0;
};

// Runs one arm end to end and writes into the output directory:
//   config.ini, metrics.csv, manifest.json,
//   checkpoints/ (per output.checkpoints),
//   attacker/ (reconstructions, traces, poisoned previews; dump_images only).
// Module errors are rethrown with the scenario name attached.
ScenarioResult run_scenario(const ScenarioConfig& cfg, const ScenarioOptions& options = {});

}  // namespace spin::experiments

#endif  // SPIN_EXPERIMENTS_SCENARIO_H_
