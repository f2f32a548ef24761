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

#include "spin/experiments/config.h"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "spin/common/error.h"
#include "spin/nn/architecture.h"

#ifndef SPIN_DEFAULT_DATA_DIR
#define SPIN_DEFAULT_DATA_DIR "data"
#endif

namespace spin::experiments {

std::string_view arm_name(Arm arm) {
  switch (arm) {
    case Arm::kBaseline: return "baseline";
    case Arm::kInversionOnly: return "inversion-only";
    case Arm::kSpin: return "spin";
  }
  return "unknown";
}

std::string_view dataset_name(DatasetKind kind) {
  return kind == DatasetKind::kMnist ? "mnist" : "signs";
}

namespace {

using Setter = std::function<std::string(ScenarioConfig&, const std::string&)>;
using Getter = std::function<std::string(const ScenarioConfig&)>;

struct Field {
  std::string section;
  std::string key;
  Setter set;
  Getter get;
  std::string name() const { return section + "." + key; }
};

template <typename T>
std::string parse_integer(const std::string& text, T& out) {
  T v{};
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) return "expected an integer, got '" + text + "'";
  out = v;
  return {};
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Prefer the shortest form that reads back identically.
  for (int prec = 1; prec <= 17; ++prec) {
    char shorter[64];
    std::snprintf(shorter, sizeof shorter, "%.*g", prec, v);
    if (std::strtod(shorter, nullptr) == v) return shorter;
  }
  return buf;
}

template <typename T>
Field integer(std::string section, std::string key, T ScenarioConfig::*member) {
  return {std::move(section), std::move(key),
          [member](ScenarioConfig& c, const std::string& t) { return parse_integer(t, c.*member); },
          [member](const ScenarioConfig& c) { return std::to_string(c.*member); }};
}

Field real(std::string section, std::string key, double ScenarioConfig::*member) {
  return {std::move(section), std::move(key),
          [member](ScenarioConfig& c, const std::string& t) -> std::string {
            double v = 0.0;
            auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
            if (ec != std::errc() || p != t.data() + t.size() || !std::isfinite(v)) {
              return "expected a finite number, got '" + t + "'";
            }
            c.*member = v;
            return {};
          },
          [member](const ScenarioConfig& c) { return format_double(c.*member); }};
}

Field boolean(std::string section, std::string key, bool ScenarioConfig::*member) {
  return {std::move(section), std::move(key),
          [member](ScenarioConfig& c, const std::string& t) -> std::string {
            if (t == "true" || t == "yes" || t == "1") {
              c.*member = true;
            } else if (t == "false" || t == "no" || t == "0") {
              c.*member = false;
            } else {
              return "expected true or false, got '" + t + "'";
            }
            return {};
          },
          [member](const ScenarioConfig& c) { return std::string(c.*member ? "true" : "false"); }};
}

Field text(std::string section, std::string key, std::string ScenarioConfig::*member) {
  return {std::move(section), std::move(key),
          [member](ScenarioConfig& c, const std::string& t) {
            c.*member = t;
            return std::string();
          },
          [member](const ScenarioConfig& c) { return c.*member; }};
}

Field path(std::string section, std::string key, std::filesystem::path ScenarioConfig::*member) {
  return {std::move(section), std::move(key),
          [member](ScenarioConfig& c, const std::string& t) {
            c.*member = t;
            return std::string();
          },
          [member](const ScenarioConfig& c) { return (c.*member).string(); }};
}

template <typename E>
Field choice(std::string section, std::string key, E ScenarioConfig::*member,
             std::vector<std::pair<std::string, E>> options) {
  return {std::move(section), std::move(key),
          [member, options](ScenarioConfig& c, const std::string& t) -> std::string {
            std::string names;
            for (const auto& [n, v] : options) {
              if (n == t) {
                c.*member = v;
                return {};
              }
              names += (names.empty() ? "" : " | ") + n;
            }
            return "expected one of " + names + ", got '" + t + "'";
          },
          [member, options](const ScenarioConfig& c) {
            for (const auto& [n, v] : options) {
              if (v == c.*member) return n;
            }
            return std::string("?");
          }};
}

const std::vector<Field>& fields() {
  using C = ScenarioConfig;
  static const std::vector<Field> all = {
      text("scenario", "name", &C::name),
      choice("scenario", "arm", &C::arm,
             {{"baseline", Arm::kBaseline}, {"inversion-only", Arm::kInversionOnly}, {"spin", Arm::kSpin}}),
      choice("scenario", "dataset", &C::dataset, {{"mnist", DatasetKind::kMnist}, {"signs", DatasetKind::kSigns}}),
      integer("scenario", "master_seed", &C::master_seed),
      integer("scenario", "rounds", &C::rounds),
      text("scenario", "output_dir", &C::output_dir),
      integer("scenario", "threads", &C::threads),

      path("data", "mnist_images", &C::mnist_images),
      path("data", "mnist_labels", &C::mnist_labels),
      boolean("data", "mnist_downsample", &C::mnist_downsample),
      integer("data", "mnist_limit", &C::mnist_limit),
      real("data", "train_ratio", &C::train_ratio),
      real("data", "val_ratio", &C::val_ratio),
      real("data", "test_ratio", &C::test_ratio),
      integer("data", "signs_per_class", &C::signs_per_class),
      integer("data", "signs_size", &C::signs_size),
      real("data", "signs_noise", &C::signs_noise),

      text("model", "architecture", &C::architecture),

      integer("participants", "benign", &C::benign),
      integer("participants", "attackers", &C::attackers),
      real("participants", "benign_learning_rate", &C::benign_learning_rate),
      integer("participants", "benign_epochs", &C::benign_epochs),
      integer("participants", "benign_batch_size", &C::benign_batch_size),
      real("participants", "attacker_learning_rate", &C::attacker_learning_rate),
      integer("participants", "attacker_epochs", &C::attacker_epochs),
      real("participants", "attacker_decay_factor", &C::attacker_decay_factor),
      integer("participants", "attacker_decay_period", &C::attacker_decay_period),
      integer("participants", "attacker_batch_size", &C::attacker_batch_size),

      choice("aggregation", "mode", &C::aggregation,
             {{"average-models", fed::AggregationMode::kAverageModels},
              {"average-gradients", fed::AggregationMode::kAverageGradients}}),
      real("aggregation", "global_learning_rate", &C::global_learning_rate),

      integer("attack", "start_round", &C::attack_start_round),
      integer("attack", "stop_round", &C::attack_stop_round),
      integer("attack", "victims", &C::victims),
      choice("attack", "interception", &C::interception,
             {{"first-gradient", fed::InterceptionMode::kFirstGradient},
              {"model-delta", fed::InterceptionMode::kModelDelta}}),
      real("attack", "assumed_victim_rate", &C::assumed_victim_rate),
      boolean("attack", "invert_every_round", &C::invert_every_round),

      integer("inversion", "restarts", &C::inversion_restarts),
      integer("inversion", "max_evaluations", &C::inversion_max_evaluations),
      integer("inversion", "history_size", &C::inversion_history_size),
      real("inversion", "initial_step", &C::inversion_initial_step),

      integer("gan", "epochs", &C::gan_epochs),
      integer("gan", "steps_per_epoch", &C::gan_steps_per_epoch),
      integer("gan", "batch_size", &C::gan_batch_size),
      real("gan", "generator_rate", &C::gan_generator_rate),
      real("gan", "discriminator_rate", &C::gan_discriminator_rate),
      choice("gan", "generator_loss", &C::gan_generator_loss,
             {{"saturating", gan::GeneratorLoss::kSaturating},
              {"non-saturating", gan::GeneratorLoss::kNonSaturating}}),
      choice("gan", "generator_optimizer", &C::gan_generator_optimizer,
             {{"adam", gan::GeneratorOptimizer::kAdam}, {"sgd", gan::GeneratorOptimizer::kSgd}}),
      real("gan", "equilibrium_tolerance", &C::gan_equilibrium_tolerance),
      integer("gan", "samples_per_class", &C::gan_samples_per_class),
      integer("gan", "latent_dim", &C::gan_latent_dim),
      integer("gan", "hidden", &C::gan_hidden),

      boolean("output", "dump_images", &C::dump_images),
      choice("output", "checkpoints", &C::checkpoints,
             {{"none", CheckpointPolicy::kNone}, {"final", CheckpointPolicy::kFinal},
              {"every-round", CheckpointPolicy::kEveryRound}}),
  };
  return all;
}

const Field* find_field(const std::string& section, const std::string& key) {
  for (const Field& f : fields()) {
    if (f.section == section && f.key == key) return &f;
  }
  return nullptr;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const Field& f : fields()) out.push_back(f.name());
  return out;
}

namespace {

std::vector<std::string> violations(const ScenarioConfig& c) {
  std::vector<std::string> errors;
  auto need = [&](bool ok, const std::string& field, const std::string& what) {
    if (!ok) errors.push_back(field + ": " + what);
  };
  need(!c.name.empty(), "scenario.name", "must not be empty");
  need(c.rounds >= 1, "scenario.rounds", "must be >= 1");
  need(c.threads >= 1, "scenario.threads", "must be >= 1");
  need(!c.output_dir.empty(), "scenario.output_dir", "must not be empty");

  need(c.train_ratio > 0.0, "data.train_ratio", "must be > 0");
  need(c.val_ratio >= 0.0, "data.val_ratio", "must be >= 0");
  need(c.test_ratio > 0.0, "data.test_ratio", "must be > 0");
  need(std::abs(c.train_ratio + c.val_ratio + c.test_ratio - 1.0) <= 1e-9, "data.train_ratio",
       "train_ratio + val_ratio + test_ratio must equal 1");
  if (c.dataset == DatasetKind::kMnist) {
    need(!c.mnist_images.empty() && std::filesystem::exists(c.mnist_images), "data.mnist_images",
         "file not found: " + c.mnist_images.string());
    need(!c.mnist_labels.empty() && std::filesystem::exists(c.mnist_labels), "data.mnist_labels",
         "file not found: " + c.mnist_labels.string());
  } else {
    need(c.signs_per_class >= 1, "data.signs_per_class", "must be >= 1");
    need(c.signs_size >= 12, "data.signs_size", "must be >= 12");
    need(c.signs_noise >= 0.0 && c.signs_noise <= 1.0, "data.signs_noise", "must lie in [0, 1]");
  }

  need(c.architecture == "mlp-s" || c.architecture == "conv-s", "model.architecture",
       "must be mlp-s or conv-s");

  need(c.benign >= 1, "participants.benign", "must be >= 1");
  if (c.arm == Arm::kBaseline) {
    need(c.attackers == 0, "participants.attackers", "must be 0 for the baseline arm");
  } else {
    need(c.attackers >= 1, "participants.attackers", "must be >= 1 for the " + std::string(arm_name(c.arm)) + " arm");
    need(c.attackers <= 1, "participants.attackers", "only a single attacker is supported");
  }
  need(c.benign_learning_rate > 0.0, "participants.benign_learning_rate", "must be > 0");
  need(c.benign_batch_size >= 1, "participants.benign_batch_size", "must be >= 1");
  need(c.attacker_learning_rate > 0.0, "participants.attacker_learning_rate", "must be > 0");
  need(c.attacker_decay_factor > 0.0, "participants.attacker_decay_factor", "must be > 0");
  need(c.attacker_batch_size >= 1, "participants.attacker_batch_size", "must be >= 1");

  need(c.global_learning_rate > 0.0, "aggregation.global_learning_rate", "must be > 0");

  need(c.attack_start_round >= 1, "attack.start_round", "must be >= 1");
  need(c.attack_stop_round == 0 || c.attack_stop_round > c.attack_start_round, "attack.stop_round",
       "must be 0 or greater than start_round");
  need(c.assumed_victim_rate > 0.0, "attack.assumed_victim_rate", "must be > 0");
  if (c.arm != Arm::kBaseline) {
    need(c.victims >= 1, "attack.victims", "must be >= 1 when an attacker is present");
    need(c.victims <= c.benign, "attack.victims", "must not exceed participants.benign");
    need(c.attack_start_round >= 2 || c.invert_every_round, "attack.start_round",
         "must be >= 2 so the attacker can invert intercepts before submitting (or set invert_every_round)");
  }

  need(c.inversion_restarts >= 1, "inversion.restarts", "must be >= 1");
  need(c.inversion_max_evaluations >= 1, "inversion.max_evaluations", "must be >= 1");
  need(c.inversion_history_size >= 1, "inversion.history_size", "must be >= 1");
  need(c.inversion_initial_step > 0.0, "inversion.initial_step", "must be > 0");

  need(c.gan_epochs >= 1, "gan.epochs", "must be >= 1");
  need(c.gan_steps_per_epoch >= 1, "gan.steps_per_epoch", "must be >= 1");
  need(c.gan_batch_size >= 1, "gan.batch_size", "must be >= 1");
  need(c.gan_generator_rate > 0.0, "gan.generator_rate", "must be > 0");
  need(c.gan_discriminator_rate >= 0.0, "gan.discriminator_rate", "must be >= 0");
  need(c.gan_equilibrium_tolerance >= 0.0, "gan.equilibrium_tolerance", "must be >= 0");
  need(c.gan_samples_per_class >= 1, "gan.samples_per_class", "must be >= 1");
  need(c.gan_latent_dim >= 1, "gan.latent_dim", "must be >= 1");
  need(c.gan_hidden >= 1, "gan.hidden", "must be >= 1");

  return errors;
}

void raise_if_any(const std::vector<std::string>& errors) {
  if (errors.empty()) return;
  std::string msg = std::to_string(errors.size()) + " invalid setting(s)";
  for (const auto& e : errors) msg += "\n  " + e;
  fail(ErrorCode::kInvalidConfig, msg);
}

}  // namespace

void ScenarioConfig::validate() const { raise_if_any(violations(*this)); }

std::string ScenarioConfig::to_ini() const {
  std::ostringstream out;
  std::string section;
  for (const Field& f : fields()) {
    if (f.section != section) {
      if (!section.empty()) out << "\n";
      section = f.section;
      out << "[" << section << "]\n";
    }
    out << f.key << " = " << f.get(*this) << "\n";
  }
  return out.str();
}

ScenarioConfig parse_config(std::string_view text, const std::filesystem::path& base_dir,
                            const ConfigOverrides& overrides) {
  ScenarioConfig cfg;
  cfg.base_dir = base_dir;
  cfg.mnist_images = std::filesystem::path(SPIN_DEFAULT_DATA_DIR) / "mnist" / "mnist5k-images-idx3-ubyte";
  cfg.mnist_labels = std::filesystem::path(SPIN_DEFAULT_DATA_DIR) / "mnist" / "mnist5k-labels-idx1-ubyte";
  std::vector<std::string> errors;

  boost::property_tree::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    fail(ErrorCode::kInvalidConfig, "line " + std::to_string(e.line()) + ": " + e.message());
  }

  auto apply = [&](const std::string& section, const std::string& key, const std::string& value,
                   const std::string& origin) {
    const Field* f = find_field(section, key);
    if (!f) {
      errors.push_back(origin + section + "." + key + ": unknown setting");
      return;
    }
    std::string err = f->set(cfg, trim(value));
    if (!err.empty()) errors.push_back(origin + f->name() + ": " + err);
  };

  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      errors.push_back(section + ": setting outside any [section]");
      continue;
    }
    for (const auto& [key, node] : body) apply(section, key, node.data(), "");
  }
  for (const auto& [name, value] : overrides) {
    auto dot = name.find('.');
    if (dot == std::string::npos) {
      errors.push_back("override " + name + ": expected section.key");
      continue;
    }
    apply(name.substr(0, dot), name.substr(dot + 1), value, "override ");
  }
  for (auto* p : {&cfg.mnist_images, &cfg.mnist_labels}) {
    if (!p->empty() && p->is_relative()) *p = (base_dir / *p).lexically_normal();
  }
  for (auto& v : violations(cfg)) {
    // Fields that failed to parse are reported once.
    if (std::none_of(errors.begin(), errors.end(), [&](const std::string& e) {
          return e.find(v.substr(0, v.find(':')) + ":") != std::string::npos;
        })) {
      errors.push_back(v);
    }
  }
  raise_if_any(errors);
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoError, "cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  std::filesystem::path base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  return parse_config(buf.str(), base, overrides);
}

}  // namespace spin::experiments
