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

#include "spin/gan/attacker.h"

#include <algorithm>

#include "spin/common/error.h"
#include "spin/common/rng.h"
#include "spin/data/io.h"

namespace spin::gan {

std::string_view attack_mode_name(AttackMode mode) {
  return mode == AttackMode::kInversionOnly ? "inversion-only" : "spin";
}

SpinAttacker::SpinAttacker(AttackerConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.participant.role = fed::Role::kAttacker;
  cfg_.participant.validate();
  cfg_.inversion.validate();
  cfg_.gan.validate();
  cfg_.inversion.counters = cfg_.counters;
  cfg_.gan.counters = cfg_.counters;
}

void SpinAttacker::absorb(const fed::InterceptedUpdate& update) {
  inversion::InversionConfig ic = cfg_.inversion;
  ic.seed = derive_seed(cfg_.inversion.seed, "invert", static_cast<std::uint64_t>(update.round) * 1000003u +
                                                           static_cast<std::uint64_t>(update.victim));
  ic.batch_size = update.batch_size;
  inversion::ReconstructionResult r = inversion::invert(update, ic);
  const nn::ArchitectureSpec& arch = update.reference.architecture();
  std::uint64_t first_id = reconstructions_ ? reconstructions_->size() : 0;
  data::Dataset fresh = inversion::to_dataset(r, arch, "reconstructions", first_id);
  if (!reconstructions_) {
    reconstructions_ = fresh;
  } else {
    std::vector<data::Example> all = reconstructions_->examples();
    all.insert(all.end(), fresh.examples().begin(), fresh.examples().end());
    reconstructions_ = data::Dataset("reconstructions", arch.classes, arch.input, std::move(all),
                                     data::SplitTag::kAll, "inversion");
  }
  log_.push_back({update.round, update.victim, r.matching_loss, r.labels, r.pixels});
  if (!cfg_.dump_dir.empty()) {
    std::string tag = "r" + std::to_string(update.round) + "_v" + std::to_string(update.victim);
    data::export_pgm(fresh, cfg_.dump_dir / "reconstructions" / tag, update.round);
    inversion::write_trace_csv(r, cfg_.dump_dir / "inversion_traces" / (tag + ".csv"));
  }
}

std::optional<nn::ModelState> SpinAttacker::on_round(const fed::AttackerContext& ctx) {
  if (!ctx.active || cfg_.invert_every_round) {
    for (const auto& u : ctx.intercepts) absorb(u);
  }
  if (!ctx.active) return std::nullopt;
  const nn::ModelState& global = *ctx.global;
  if (!reconstructions_) {
    fail(ErrorCode::kInvalidConfig, "attacker became active with no reconstructions; intercept at "
                                    "least one victim before attack_start_round");
  }
  fed::ParticipantConfig pc = cfg_.participant;
  pc.seed = derive_seed(cfg_.participant.seed, "local-train", static_cast<std::uint64_t>(ctx.round));
  if (cfg_.mode == AttackMode::kInversionOnly) {
    fed::LocalTrainOptions opts;
    opts.counters = cfg_.counters;
    return fed::local_train(global, *reconstructions_, pc, opts).model;
  }
  GanTrainConfig gc = cfg_.gan;
  gc.seed = derive_seed(cfg_.gan.seed, "gan-round", static_cast<std::uint64_t>(ctx.round));
  PoisonResult p = produce_poisoned_model(global, *reconstructions_, gan_, gc, pc);
  if (!cfg_.dump_dir.empty()) {
    std::vector<std::size_t> preview;
    for (std::size_t i = 0; i < std::min<std::size_t>(p.poisoned.size(), 10); ++i) preview.push_back(i);
    data::export_pgm(p.poisoned.subset(preview, "poisoned-preview"), cfg_.dump_dir / "poisoned", ctx.round);
    write_gan_trace_csv(p.trace, cfg_.dump_dir / "gan_trace.csv", trace_started_);
    trace_started_ = true;
  }
  return p.model;
}

}  // namespace spin::gan
