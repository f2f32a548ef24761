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

#include "spin/gan/gan.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "spin/autodiff/backward.h"
#include "spin/autodiff/ops.h"
#include "spin/common/error.h"

namespace spin::gan {

std::string_view generator_loss_name(GeneratorLoss loss) {
  return loss == GeneratorLoss::kSaturating ? "saturating" : "non-saturating";
}

GeneratorLoss parse_generator_loss(std::string_view text) {
  if (text == "saturating") return GeneratorLoss::kSaturating;
  if (text == "non-saturating") return GeneratorLoss::kNonSaturating;
  fail(ErrorCode::kInvalidConfig, "generator loss must be saturating or non-saturating, got '" +
                                      std::string(text) + "'");
}

std::string_view generator_optimizer_name(GeneratorOptimizer opt) {
  return opt == GeneratorOptimizer::kSgd ? "sgd" : "adam";
}

GeneratorOptimizer parse_generator_optimizer(std::string_view text) {
  if (text == "sgd") return GeneratorOptimizer::kSgd;
  if (text == "adam") return GeneratorOptimizer::kAdam;
  fail(ErrorCode::kInvalidConfig, "generator optimizer must be sgd or adam, got '" + std::string(text) + "'");
}

namespace {

ad::Tensor glorot(ad::Shape shape, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::vector<double> v(ad::numel(shape));
  for (double& x : v) x = rng.uniform(-a, a);
  return ad::Tensor::constant(std::move(shape), std::move(v));
}

std::vector<ad::Tensor> sgd(std::span<const ad::Tensor> params, std::span<const ad::Tensor> grads,
                            double rate) {
  std::vector<ad::Tensor> out;
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto w = params[i].values();
    auto g = grads[i].values();
    std::vector<double> v(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) v[k] = w[k] - rate * g[k];
    out.push_back(ad::Tensor::constant(params[i].shape(), std::move(v)));
  }
  return out;
}

int argmax(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < row.size(); ++c) {
    if (row[c] > row[best]) best = c;
  }
  return static_cast<int>(best);
}

}  // namespace

GeneratorState::GeneratorState(data::ImageShape image, std::size_t latent_dim, std::size_t hidden,
                               std::vector<ad::Tensor> parameters)
    : image_(image), latent_dim_(latent_dim), hidden_(hidden) {
  ad::Shape expect[4] = {{latent_dim, hidden}, {hidden}, {hidden, image.size()}, {image.size()}};
  if (parameters.size() != 4) fail(ErrorCode::kShapeMismatch, "generator needs 4 parameter tensors");
  for (std::size_t i = 0; i < 4; ++i) {
    if (parameters[i].shape() != expect[i]) {
      fail(ErrorCode::kShapeMismatch, "generator parameter " + std::to_string(i) + " expects " +
                                          ad::shape_str(expect[i]));
    }
    params_.push_back(parameters[i].detach());
    m_.emplace_back(params_.back().numel(), 0.0);
    v_.emplace_back(params_.back().numel(), 0.0);
  }
}

GeneratorState GeneratorState::initialize(data::ImageShape image, std::uint64_t seed,
                                          std::size_t latent_dim, std::size_t hidden) {
  if (latent_dim < 1 || hidden < 1 || image.size() < 1) {
    fail(ErrorCode::kInvalidConfig, "generator dimensions must be positive");
  }
  Rng rng(seed);
  std::vector<ad::Tensor> p;
  p.push_back(glorot({latent_dim, hidden}, latent_dim, hidden, rng));
  p.push_back(ad::Tensor::zeros({hidden}));
  p.push_back(glorot({hidden, image.size()}, hidden, image.size(), rng));
  p.push_back(ad::Tensor::zeros({image.size()}));
  return GeneratorState(image, latent_dim, hidden, std::move(p));
}

ad::Tensor GeneratorState::generate(std::span<const ad::Tensor> params, const ad::Tensor& latents) const {
  if (latents.rank() != 2 || latents.dim(1) != latent_dim_) {
    fail(ErrorCode::kShapeMismatch, "latents " + ad::shape_str(latents.shape()) +
                                        " do not match latent dimension " + std::to_string(latent_dim_));
  }
  ad::Tensor h = ad::sigmoid(ad::affine(latents, params[0], params[1]));
  ad::Tensor o = ad::sigmoid(ad::affine(h, params[2], params[3]));
  return ad::reshape(o, {latents.dim(0), image_.height, image_.width, image_.channels});
}

GeneratorState GeneratorState::updated(std::span<const ad::Tensor> grads, double rate,
                                       GeneratorOptimizer opt) const {
  GeneratorState next = *this;
  ++next.step_;
  if (opt == GeneratorOptimizer::kSgd) {
    next.params_ = sgd(params_, grads, rate);
    return next;
  }
  constexpr double kBeta1 = 0.5, kBeta2 = 0.999, kEps = 1e-8;
  double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(next.step_));
  double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(next.step_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto w = params_[i].values();
    auto g = grads[i].values();
    std::vector<double> v(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) {
      next.m_[i][k] = kBeta1 * m_[i][k] + (1.0 - kBeta1) * g[k];
      next.v_[i][k] = kBeta2 * v_[i][k] + (1.0 - kBeta2) * g[k] * g[k];
      v[k] = w[k] - rate * (next.m_[i][k] / c1) / (std::sqrt(next.v_[i][k] / c2) + kEps);
    }
    next.params_[i] = ad::Tensor::constant(params_[i].shape(), std::move(v));
  }
  return next;
}

std::vector<ad::Tensor> DiscriminatorState::parameters() const {
  std::vector<ad::Tensor> p = classifier.tensors();
  p.push_back(fake_weight);
  p.push_back(fake_bias);
  return p;
}

DiscriminatorState refresh_discriminator(const nn::ModelState& global,
                                         const std::optional<DiscriminatorState>& prior,
                                         std::uint64_t seed) {
  DiscriminatorState d;
  d.classifier = global;
  std::size_t f = global.architecture().feature_width();
  if (prior) {
    if (!prior->classifier.compatible_with(global)) {
      fail(ErrorCode::kIncompatibleModels, "discriminator architecture differs from the global model");
    }
    d.fake_weight = prior->fake_weight;
    d.fake_bias = prior->fake_bias;
  } else {
    Rng rng(seed);
    d.fake_weight = glorot({f, 1}, f, 1, rng);
    d.fake_bias = ad::Tensor::zeros({1});
  }
  return d;
}

DiscriminatorOutput discriminate(const nn::ArchitectureSpec& arch,
                                 std::span<const ad::Tensor> disc_params, const ad::Tensor& x) {
  std::size_t n = disc_params.size() - 2;
  std::span<const ad::Tensor> cls = disc_params.subspan(0, n);
  ad::Tensor feats = nn::forward_features(arch, cls, x);
  ad::Tensor class_logits = ad::affine(feats, cls[n - 2], cls[n - 1]);
  ad::Tensor fake = ad::affine(feats, disc_params[n], disc_params[n + 1]);

  std::size_t c = arch.classes;
  std::vector<double> s1(c * (c + 1), 0.0), s2(c + 1, 0.0);
  for (std::size_t i = 0; i < c; ++i) s1[i * (c + 1) + i] = 1.0;
  s2[c] = 1.0;
  ad::Tensor all = ad::add(ad::matmul(class_logits, ad::Tensor::constant({c, c + 1}, std::move(s1))),
                           ad::matmul(fake, ad::Tensor::constant({1, c + 1}, std::move(s2))));
  ad::Tensor lse_all = ad::log_sum_exp(all);
  return {class_logits, ad::sub(ad::log_sum_exp(class_logits), lse_all), ad::sub(fake, lse_all)};
}

DiscriminatorOutput discriminate(const DiscriminatorState& disc, const ad::Tensor& x) {
  return discriminate(disc.classifier.architecture(), disc.parameters(), x);
}

ad::Tensor gan_value(const ad::Tensor& log_real_on_real, const ad::Tensor& log_fake_on_fake) {
  return ad::add(ad::mean(log_real_on_real), ad::mean(log_fake_on_fake));
}

void GanTrainConfig::validate() const {
  if (epochs < 1) fail(ErrorCode::kInvalidConfig, "gan epochs must be >= 1");
  if (steps_per_epoch < 1) fail(ErrorCode::kInvalidConfig, "gan steps_per_epoch must be >= 1");
  if (batch_size < 1) fail(ErrorCode::kInvalidConfig, "gan batch_size must be >= 1");
  if (!(generator_rate > 0.0)) fail(ErrorCode::kInvalidConfig, "gan generator_rate must be positive");
  if (!(discriminator_rate >= 0.0)) fail(ErrorCode::kInvalidConfig, "gan discriminator_rate must be >= 0");
  if (!(equilibrium_tolerance >= 0.0)) fail(ErrorCode::kInvalidConfig, "gan equilibrium_tolerance must be >= 0");
  if (samples_per_class < 1) fail(ErrorCode::kInvalidConfig, "gan samples_per_class must be >= 1");
  if (latent_dim < 1 || hidden < 1) fail(ErrorCode::kInvalidConfig, "gan latent_dim and hidden must be >= 1");
}

GanStepResult gan_step(const GeneratorState& gen, const DiscriminatorState& disc,
                       const data::Batch& real, const GanTrainConfig& cfg, Rng& rng) {
  const nn::ArchitectureSpec& arch = disc.classifier.architecture();
  std::size_t b = real.size();
  if (b == 0) fail(ErrorCode::kInvalidArgument, "empty real batch");
  bump(&Instrumentation::gan_steps, cfg.counters);

  std::vector<double> z(b * gen.latent_dim());
  for (double& v : z) v = rng.normal();
  ad::Tensor latents = ad::Tensor::constant({b, gen.latent_dim()}, std::move(z));

  GanStepResult out;
  // Discriminator: ascend the value.
  std::vector<ad::Tensor> dleaves;
  for (const auto& t : disc.parameters()) dleaves.push_back(t.as_leaf());
  ad::Tensor fake_x = gen.generate(latents);
  ad::Tensor value = gan_value(discriminate(arch, dleaves, real.inputs).log_real,
                               discriminate(arch, dleaves, fake_x).log_fake);
  out.losses.rho = value.item();
  out.losses.d_loss = -out.losses.rho;
  DiscriminatorState next_disc = disc;
  if (cfg.discriminator_rate > 0.0) {
    std::vector<ad::Tensor> dg = ad::backward(ad::scale(value, -1.0), dleaves);
    std::vector<ad::Tensor> updated = sgd(disc.parameters(), dg, cfg.discriminator_rate);
    ad::Tensor fb = updated.back();
    updated.pop_back();
    ad::Tensor fw = updated.back();
    updated.pop_back();
    next_disc.classifier = disc.classifier.with_parameters(std::move(updated), disc.classifier.version());
    next_disc.fake_weight = fw;
    next_disc.fake_bias = fb;
  }

  // Generator against the updated discriminator.
  std::vector<ad::Tensor> gleaves;
  for (const auto& t : gen.parameters()) gleaves.push_back(t.as_leaf());
  DiscriminatorOutput d = discriminate(next_disc, gen.generate(gleaves, latents));
  ad::Tensor g_loss = cfg.generator_loss == GeneratorLoss::kSaturating
                          ? ad::mean(d.log_fake)
                          : ad::scale(ad::mean(d.log_real), -1.0);
  out.losses.g_loss = g_loss.item();
  std::vector<ad::Tensor> gg = ad::backward(g_loss, gleaves);
  out.generator = gen.updated(gg, cfg.generator_rate, cfg.generator_optimizer);
  out.discriminator = std::move(next_disc);
  return out;
}

data::Dataset sample_generator(const GeneratorState& gen, std::size_t count, std::uint64_t seed,
                               std::size_t classes) {
  if (count < 1) fail(ErrorCode::kInvalidArgument, "sample count must be >= 1");
  Rng rng(seed);
  std::vector<double> z(count * gen.latent_dim());
  for (double& v : z) v = rng.normal();
  ad::Tensor x = gen.generate(ad::Tensor::constant({count, gen.latent_dim()}, std::move(z)));
  std::size_t per = gen.image().size();
  auto v = x.values();
  std::vector<data::Example> ex;
  for (std::size_t i = 0; i < count; ++i) {
    ex.push_back(data::make_example(i, {v.begin() + static_cast<long>(i * per), v.begin() + static_cast<long>((i + 1) * per)},
                                    data::kNoLabel, data::Provenance::kPoisoned));
  }
  return data::Dataset("generated", classes, gen.image(), std::move(ex), data::SplitTag::kAll, "generator");
}

int flip_label(int label, std::size_t classes) {
  return static_cast<int>((static_cast<std::size_t>(label) + 1) % classes);
}

PoisonResult produce_poisoned_model(const nn::ModelState& global, const data::Dataset& reconstructions,
                                    GanState& state, const GanTrainConfig& cfg,
                                    const fed::ParticipantConfig& attacker_cfg) {
  cfg.validate();
  attacker_cfg.validate();
  const nn::ArchitectureSpec& arch = global.architecture();
  if (reconstructions.empty()) fail(ErrorCode::kInvalidArgument, "no reconstructions to train the GAN on");
  if (reconstructions.shape() != arch.input) {
    fail(ErrorCode::kShapeMismatch, "reconstructions do not match the model input");
  }
  for (const auto& e : reconstructions.examples()) {
    if (e.provenance != data::Provenance::kReconstructed) {
      fail(ErrorCode::kInvalidArgument, "GAN real data must be tagged reconstructed");
    }
  }
  if (state.generator.parameters().empty()) {
    state.generator = GeneratorState::initialize(arch.input, derive_seed(cfg.seed, "generator"),
                                                 cfg.latent_dim, cfg.hidden);
  }

  PoisonResult out;
  Rng rng(derive_seed(cfg.seed, "gan-steps", global.version()));
  const double nash = 2.0 * std::log(0.5);
  std::size_t calm = 0;
  DiscriminatorState disc;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    disc = refresh_discriminator(global, state.discriminator, derive_seed(cfg.seed, "fake-unit"));
    double rho_sum = 0.0;
    for (std::size_t step = 0; step < cfg.steps_per_epoch; ++step) {
      std::vector<std::size_t> idx(cfg.batch_size);
      for (auto& i : idx) i = static_cast<std::size_t>(rng.below(reconstructions.size()));
      data::Batch real = data::make_batch(reconstructions, idx);
      GanStepResult r = gan_step(state.generator, disc, real, cfg, rng);
      state.generator = std::move(r.generator);
      disc = std::move(r.discriminator);
      rho_sum += r.losses.rho;
      out.trace.push_back({epoch, step, r.losses});
    }
    state.discriminator = disc;
    ++out.epochs_run;
    double rho = rho_sum / static_cast<double>(cfg.steps_per_epoch);
    calm = std::abs(rho - nash) < cfg.equilibrium_tolerance ? calm + 1 : 0;
    if (calm >= 3) {
      out.equilibrium_reached = true;
      break;
    }
  }

  std::size_t count = cfg.samples_per_class * arch.classes;
  data::Dataset samples = sample_generator(state.generator, count,
                                           derive_seed(cfg.seed, "poison-samples", global.version()),
                                           arch.classes);
  data::Batch sb = data::make_batch(samples);
  ad::Tensor class_logits = discriminate(disc, sb.inputs).class_logits;
  std::vector<int> labels(count);
  for (std::size_t i = 0; i < count; ++i) {
    int src = argmax(class_logits.values().subspan(i * arch.classes, arch.classes));
    out.source_labels.push_back(src);
    labels[i] = flip_label(src, arch.classes);
  }
  out.poisoned = samples.relabeled(labels, data::Provenance::kPoisoned).with_name("poisoned");

  fed::LocalTrainOptions opts;
  opts.counters = cfg.counters;
  out.model = fed::local_train(global, out.poisoned, attacker_cfg, opts).model;
  bump(&Instrumentation::poisoned_models, cfg.counters);
  return out;
}

void write_gan_trace_csv(const std::vector<GanTraceRow>& trace, const std::filesystem::path& path,
                         bool append) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  bool header = !append || !std::filesystem::exists(path);
  std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
  if (!out) fail(ErrorCode::kIoError, "cannot write " + path.string());
  if (header) out << "epoch,step,d_loss,g_loss,rho\n";
  char buf[160];
  for (const auto& r : trace) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.9e,%.9e,%.9e\n", r.epoch, r.step, r.losses.d_loss,
                  r.losses.g_loss, r.losses.rho);
    out << buf;
  }
  if (!out) fail(ErrorCode::kIoError, "cannot write " + path.string());
}

}  // namespace spin::gan
