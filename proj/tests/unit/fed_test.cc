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

#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <vector>

#include "spin/common/error.h"
#include "spin/common/instrumentation.h"
#include "spin/common/rng.h"
#include "spin/data/transforms.h"
#include "spin/fed/aggregate.h"
#include "spin/fed/federation.h"
#include "spin/fed/metrics.h"
#include "spin/fed/participant.h"
#include "spin/nn/model.h"
#include "temp_dir.h"

namespace spin::fed {
namespace {

using nn::ArchitectureSpec;
using nn::ModelState;

ArchitectureSpec tiny_arch() { return ArchitectureSpec::mlp_s({1, 12, 12}, 4, 5); }

data::Dataset tiny_signs(std::size_t per_class = 6, std::uint64_t seed = 3) {
  data::SignSynthConfig c;
  c.count_per_class = per_class;
  c.image_size = 12;
  c.noise = 0.2;
  c.seed = seed;
  return data::synth_signs(c);
}

// Random parameters drawn independently of the library initializer.
ModelState random_model(std::uint64_t seed, std::uint64_t version = 0) {
  ArchitectureSpec arch = tiny_arch();
  Rng rng(seed);
  std::vector<ad::Tensor> params;
  for (const auto& spec : arch.parameter_specs()) {
    std::size_t n = std::accumulate(spec.shape.begin(), spec.shape.end(), std::size_t{1},
                                    std::multiplies<>());
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(-3.0, 3.0);
    params.push_back(ad::Tensor::constant(spec.shape, v));
  }
  return ModelState(arch, params, version);
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
  }
  return true;
}

// ---- aggregation algebra ----------------------------------------------------

TEST(ExactMean, IdenticalValuesReturnTheValue) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    double v = rng.uniform(-1e3, 1e3) * std::pow(10.0, rng.uniform(-8, 8));
    std::size_t n = 1 + rng.below(17);
    EXPECT_EQ(exact_mean(std::vector<double>(n, v)), v);
  }
}

TEST(ExactMean, MatchesLongDoubleOracle) {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> xs(2 + rng.below(20));
    long double acc = 0;
    for (double& x : xs) {
      x = rng.uniform(-5, 5);
      acc += x;
    }
    double oracle = static_cast<double>(acc / xs.size());
    EXPECT_NEAR(exact_mean(xs), oracle, 1e-14);
  }
}

TEST(AggregateModels, IdempotentOnIdenticalModels) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    ModelState m = random_model(seed);
    std::vector<ModelState> copies(2 + seed % 7, m);
    ModelState avg = aggregate_models(copies);
    EXPECT_TRUE(bit_equal(avg.flatten(), m.flatten())) << "seed " << seed;
  }
}

TEST(AggregateModels, PermutationInvariantBitExact) {
  Rng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<ModelState> models;
    for (std::size_t i = 0; i < 3 + rng.below(6); ++i) models.push_back(random_model(rng.next_u64()));
    ModelState reference = aggregate_models(models);
    for (int p = 0; p < 5; ++p) {
      std::vector<ModelState> shuffled = models;
      rng.shuffle(std::span<ModelState>(shuffled));
      EXPECT_TRUE(bit_equal(aggregate_models(shuffled).flatten(), reference.flatten()));
    }
  }
}

TEST(AggregateModels, MatchesPlainMeanAndRunningMean) {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<ModelState> models;
    std::size_t n = 2 + rng.below(8);
    for (std::size_t i = 0; i < n; ++i) models.push_back(random_model(rng.next_u64(), i));
    std::vector<double> plain(models[0].parameter_count(), 0.0);
    for (const auto& m : models) {
      auto f = m.flatten();
      for (std::size_t k = 0; k < f.size(); ++k) plain[k] += f[k] / static_cast<double>(n);
    }
    auto batch = aggregate_models(models).flatten();
    RunningMean running;
    for (const auto& m : models) running.add(m);
    auto seq = running.result().flatten();
    EXPECT_EQ(running.count(), n);
    for (std::size_t k = 0; k < plain.size(); ++k) {
      EXPECT_NEAR(batch[k], plain[k], 1e-12);
      EXPECT_NEAR(seq[k], batch[k], 1e-12);
    }
  }
}

TEST(AggregateModels, VersionIsOnePastTheLargest) {
  std::vector<ModelState> models = {random_model(1, 4), random_model(2, 9), random_model(3, 2)};
  EXPECT_EQ(aggregate_models(models).version(), 10u);
}

TEST(AggregateModels, Errors) {
  std::vector<ModelState> none;
  try {
    aggregate_models(none);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyList);
  }
  ModelState other = ModelState::initialize(ArchitectureSpec::mlp_s({1, 12, 12}, 4, 6), 1);
  std::vector<ModelState> mixed = {random_model(1), other};
  try {
    aggregate_models(mixed);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIncompatibleModels);
  }
}

TEST(AggregateGradients, StepAlongTheMean) {
  ModelState prior = random_model(21);
  std::vector<nn::GradientVector> grads;
  for (std::uint64_t s = 0; s < 4; ++s) {
    ModelState g = random_model(100 + s);
    nn::GradientVector gv;
    for (const auto& p : g.parameters()) gv.entries.push_back(p);
    grads.push_back(gv);
  }
  auto out = aggregate_gradients(prior, grads, 0.5).flatten();
  auto w = prior.flatten();
  for (std::size_t k = 0; k < w.size(); ++k) {
    double mean = 0;
    for (const auto& g : grads) mean += g.flatten()[k] / 4.0;
    EXPECT_NEAR(out[k], w[k] - 0.5 * mean, 1e-12);
  }
}

TEST(AggregationMode, NamesRoundTrip) {
  for (auto m : {AggregationMode::kAverageModels, AggregationMode::kAverageGradients}) {
    EXPECT_EQ(parse_aggregation_mode(aggregation_mode_name(m)), m);
  }
  EXPECT_THROW(parse_aggregation_mode("median"), Error);
}

// ---- participants -----------------------------------------------------------

TEST(ParticipantConfig, AttackerScheduleDecaysEveryThreeEpochs) {
  ParticipantConfig a = ParticipantConfig::attacker(9, 1);
  const double expected[] = {0.01, 0.01, 0.01, 0.008, 0.008, 0.008, 0.0064, 0.0064, 0.0064, 0.00512};
  for (std::size_t e = 0; e < 10; ++e) EXPECT_NEAR(a.rate_at(e), expected[e], 1e-15) << e;
  ParticipantConfig b = ParticipantConfig::benign(0, 1);
  for (std::size_t e = 0; e < 4; ++e) EXPECT_EQ(b.rate_at(e), 0.05);
  EXPECT_EQ(a.epochs, 10u);
  EXPECT_EQ(b.epochs, 4u);
}

TEST(LocalTrain, FullBatchSingleEpochIsOneSgdStep) {
  data::Dataset shard = tiny_signs(3);
  ModelState m = ModelState::initialize(tiny_arch(), 4);
  ParticipantConfig cfg = ParticipantConfig::benign(0, 8);
  cfg.epochs = 1;
  cfg.batch_size = shard.size();
  auto got = local_train(m, shard, cfg).flatten();
  auto g = nn::compute_gradients(m, data::make_batch(shard)).flatten();
  auto w = m.flatten();
  for (std::size_t k = 0; k < w.size(); ++k) EXPECT_NEAR(got[k], w[k] - 0.05 * g[k], 1e-12);
}

TEST(LocalTrain, DeterministicPerSeedAndCapturesFirstGradient) {
  data::Dataset shard = tiny_signs(4);
  ModelState m = ModelState::initialize(tiny_arch(), 4);
  ParticipantConfig cfg = ParticipantConfig::benign(0, 8);
  cfg.batch_size = 3;
  Instrumentation counters;
  LocalTrainOptions opts{true, &counters};
  auto a = local_train(m, shard, cfg, opts);
  auto b = local_train(m, shard, cfg, opts);
  EXPECT_TRUE(bit_equal(a.model.flatten(), b.model.flatten()));
  EXPECT_EQ(counters.benign_local_train.load(), 2u);
  ASSERT_TRUE(a.first_step.has_value());
  EXPECT_EQ(a.first_step->batch.size(), 3u);
  auto direct = nn::compute_gradients(m, a.first_step->batch).flatten();
  EXPECT_TRUE(bit_equal(direct, a.first_step->gradient.flatten()));
  EXPECT_EQ(a.steps, 4u * 6u);  // 24 examples, batch 3

  cfg.seed = 9;
  auto c = local_train(m, shard, cfg, opts);
  EXPECT_FALSE(bit_equal(a.model.flatten(), c.model.flatten()));
}

// ---- rounds -----------------------------------------------------------------

class FixedAttacker : public AttackerParticipant {
 public:
  explicit FixedAttacker(ModelState submit) : submit_(std::move(submit)) {}
  std::optional<ModelState> on_round(const AttackerContext& ctx) override {
    calls.push_back(ctx.round);
    if (ctx.active) active_rounds.push_back(ctx.round);
    for (const auto& i : ctx.intercepts) {
      intercept_victims.push_back(i.victim);
      EXPECT_TRUE(bit_equal(i.reference.flatten(), ctx.global->flatten()));
      EXPECT_EQ(i.round, ctx.round);
    }
    if (!ctx.active) return std::nullopt;
    return submit_;
  }
  std::vector<int> calls;
  std::vector<int> active_rounds;
  std::vector<int> intercept_victims;

 private:
  ModelState submit_;
};

struct Fixture {
  data::Dataset test = tiny_signs(5, 77);
  std::vector<BenignParticipant> participants;
  ModelState init = ModelState::initialize(tiny_arch(), 17);
  Fixture() {
    auto shards = data::partition_for_participants(tiny_signs(10, 4), 4, 5);
    for (int i = 0; i < 4; ++i) {
      ParticipantConfig p = ParticipantConfig::benign(i, derive_seed(1, "participant", i));
      p.epochs = 2;
      participants.push_back({p, shards[static_cast<std::size_t>(i)]});
    }
  }
};

std::vector<std::string> rows(const std::vector<RoundRecord>& records) {
  std::vector<std::string> out;
  for (const auto& r : records) out.push_back(format_metrics_row(r, "x"));
  return out;
}

TEST(RunRounds, ThreadCountDoesNotChangeResults) {
  Fixture f;
  FederationConfig cfg;
  cfg.rounds = 4;
  ModelState g1, g4;
  cfg.threads = 1;
  auto r1 = run_rounds(f.init, f.participants, nullptr, cfg, f.test,
                       [&](const RoundRecord&, const ModelState& g) { g1 = g; });
  cfg.threads = 4;
  auto r4 = run_rounds(f.init, f.participants, nullptr, cfg, f.test,
                       [&](const RoundRecord&, const ModelState& g) { g4 = g; });
  EXPECT_EQ(rows(r1), rows(r4));
  EXPECT_TRUE(bit_equal(g1.flatten(), g4.flatten()));
  for (std::size_t i = 0; i < r1.size(); ++i) {
    EXPECT_EQ(r1[i].participant_losses, r4[i].participant_losses);
  }
}

TEST(RunRounds, AttackerWindowAndPassiveRoundsMatchBaseline) {
  Fixture f;
  FederationConfig cfg;
  cfg.rounds = 6;
  cfg.attack_start_round = 3;
  cfg.attack_stop_round = 5;
  cfg.victims = {0, 2};
  Instrumentation counters;
  cfg.counters = &counters;
  FixedAttacker attacker(ModelState::zeros(tiny_arch()));
  std::vector<ModelState> globals;
  auto attacked = run_rounds(f.init, f.participants, &attacker, cfg, f.test,
                             [&](const RoundRecord&, const ModelState& g) { globals.push_back(g); });
  FederationConfig base_cfg = cfg;
  base_cfg.victims.clear();
  base_cfg.counters = nullptr;
  std::vector<ModelState> base_globals;
  auto baseline = run_rounds(f.init, f.participants, nullptr, base_cfg, f.test,
                             [&](const RoundRecord&, const ModelState& g) { base_globals.push_back(g); });

  ASSERT_EQ(attacked.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    bool present = attacked[i].round >= 3 && attacked[i].round < 5;
    EXPECT_EQ(attacked[i].attacker_present, present) << attacked[i].round;
    EXPECT_FALSE(baseline[i].attacker_present);
  }
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_TRUE(bit_equal(globals[i].flatten(), base_globals[i].flatten())) << "round " << i + 1;
  }
  EXPECT_FALSE(bit_equal(globals[2].flatten(), base_globals[2].flatten()));
  EXPECT_EQ(attacker.active_rounds, (std::vector<int>{3, 4}));
  EXPECT_EQ(attacker.calls.size(), 6u);
  EXPECT_EQ(attacker.intercept_victims.size(), 12u);
  EXPECT_EQ(counters.intercepts.load(), 12u);
  EXPECT_EQ(counters.benign_local_train.load(), 24u);
  EXPECT_EQ(counters.aggregations.load(), 6u);
}

TEST(RunRounds, AttackerOutsideWindowLeavesGlobalModelUnchanged) {
  // An attacker that never becomes active must not perturb anything.
  Fixture f;
  FederationConfig cfg;
  cfg.rounds = 3;
  cfg.attack_start_round = 10;
  cfg.victims = {1};
  FixedAttacker attacker(ModelState::zeros(tiny_arch()));
  auto a = run_rounds(f.init, f.participants, &attacker, cfg, f.test);
  cfg.victims.clear();
  auto b = run_rounds(f.init, f.participants, nullptr, cfg, f.test);
  EXPECT_EQ(rows(a), rows(b));
}

class SilentAttacker : public AttackerParticipant {
 public:
  std::optional<ModelState> on_round(const AttackerContext&) override { return std::nullopt; }
};

TEST(RunRounds, ActiveAttackerWithoutSubmissionIsAnError) {
  Fixture f;
  FederationConfig cfg;
  cfg.rounds = 2;
  cfg.attack_start_round = 2;
  SilentAttacker attacker;
  try {
    run_rounds(f.init, f.participants, &attacker, cfg, f.test);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("round 2"), std::string::npos) << e.what();
  }
}

TEST(Evaluate, ZeroModelPredictsClassZero) {
  data::Dataset test = tiny_signs(5);
  auto ev = evaluate(ModelState::zeros(tiny_arch()), test, 7);
  EXPECT_DOUBLE_EQ(ev.accuracy, 0.25);
  EXPECT_NEAR(ev.loss, std::log(4.0), 1e-12);
}

TEST(Metrics, RowFormatAndFile) {
  RoundRecord r;
  r.round = 3;
  r.accuracy = 0.5;
  r.loss = 1.25;
  r.attacker_present = true;
  EXPECT_EQ(format_metrics_row(r, "spin"), "3,0.500000,1.250000,true,spin");
  testing::TempDir dir;
  {
    MetricsWriter w(dir / "m.csv", "spin");
    w.write(r);
  }
  EXPECT_EQ(testing::read_file(dir / "m.csv"), std::string(kMetricsHeader) + "\n3,0.500000,1.250000,true,spin\n");
}

}  // namespace
}  // namespace spin::fed
