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

// Acceptance suite: one PASS/FAIL line per criterion 1-8.
//
//   spin_acceptance [--only N[,N...]] [--strict] [--work DIR]
//
// The exit status is 0 once every selected criterion has been evaluated;
// with --strict it is 1 if any of them failed.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "../unit/oracles.h"
#include "spin/autodiff/backward.h"
#include "spin/autodiff/ops.h"
#include "spin/common/error.h"
#include "spin/common/rng.h"
#include "spin/data/io.h"
#include "spin/data/transforms.h"
#include "spin/experiments/config.h"
#include "spin/experiments/scenario.h"
#include "spin/fed/aggregate.h"
#include "spin/inversion/inversion.h"
#include "spin/nn/checkpoint.h"
#include "spin/nn/model.h"

namespace {

namespace fs = std::filesystem;
using namespace spin;
using nn::ArchitectureSpec;
using nn::ModelState;
using spin::testing::central_difference;
using spin::testing::relative_error;

const fs::path kData = SPIN_ACCEPTANCE_DATA_DIR;
const fs::path kConfigs = SPIN_ACCEPTANCE_CONFIG_DIR;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> uniform(std::size_t n, std::uint64_t seed, double lo, double hi) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

// ---- 1: gradient oracles ------------------------------------------------------

std::vector<ArchitectureSpec> small_archs() {
  return {ArchitectureSpec::mlp_s({1, 4, 4}, 3, 6), ArchitectureSpec::conv_s({1, 6, 6}, 3, 4, 3)};
}

ModelState from_flat(const ArchitectureSpec& arch, const std::vector<double>& flat) {
  std::vector<ad::Tensor> params;
  std::size_t off = 0;
  for (const auto& s : arch.parameter_specs()) {
    std::size_t n = std::accumulate(s.shape.begin(), s.shape.end(), std::size_t{1}, std::multiplies<>());
    params.push_back(ad::Tensor::constant(s.shape, {flat.begin() + static_cast<long>(off),
                                                    flat.begin() + static_cast<long>(off + n)}));
    off += n;
  }
  return ModelState(arch, params);
}

Verdict gradient_oracles() {
  auto t0 = std::chrono::steady_clock::now();
  double worst1 = 0, worst2 = 0;
  std::string sizes;
  for (const auto& arch : small_archs()) {
    sizes += (sizes.empty() ? "" : "/") + std::to_string(arch.parameter_count());
    std::size_t px = arch.input.size();
    ad::Shape pshape = {2, arch.input.height, arch.input.width, 1};
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      ModelState m = ModelState::initialize(arch, seed);
      data::Batch b;
      b.inputs = ad::Tensor::constant(pshape, uniform(2 * px, 100 + seed, 0, 1));
      b.labels = {0, 2};
      auto analytic = nn::compute_gradients(m, b).flatten();
      auto numeric = central_difference(
          [&](const std::vector<double>& w) {
            ModelState mw = from_flat(arch, w);
            std::vector<ad::Tensor> ps = mw.tensors();
            return nn::batch_loss(mw, b, ps).item();
          },
          m.flatten());
      worst1 = std::max(worst1, relative_error(analytic, numeric));

      ad::Shape one = {1, arch.input.height, arch.input.width, 1};
      data::Batch truth;
      truth.inputs = ad::Tensor::constant(one, uniform(px, 200 + seed, 0, 1));
      truth.soft_labels = ad::softmax(ad::Tensor::constant({1, 3}, uniform(3, 300 + seed, -1, 1))).detach();
      nn::GradientVector target = nn::compute_gradients(m, truth);
      std::vector<double> x0 = uniform(px + 3, 400 + seed, 0, 1);
      auto split = [&](const std::vector<double>& x, bool leaf) {
        std::vector<double> p(x.begin(), x.begin() + static_cast<long>(px)), l(x.begin() + static_cast<long>(px), x.end());
        return leaf ? inversion::DummyPair{ad::Tensor::leaf(one, p), ad::Tensor::leaf({1, 3}, l)}
                    : inversion::DummyPair{ad::Tensor::constant(one, p), ad::Tensor::constant({1, 3}, l)};
      };
      inversion::DummyPair d = split(x0, true);
      ad::Tensor loss = inversion::matching_loss(inversion::dummy_gradients(m, d), target);
      std::vector<ad::Tensor> wrt = {d.pixels, d.label_logits};
      auto g = ad::backward(loss, wrt);
      std::vector<double> second(g[0].values().begin(), g[0].values().end());
      second.insert(second.end(), g[1].values().begin(), g[1].values().end());
      auto numeric2 = central_difference(
          [&](const std::vector<double>& x) {
            return inversion::matching_loss(inversion::dummy_gradients(m, split(x, false)), target).item();
          },
          x0);
      worst2 = std::max(worst2, relative_error(second, numeric2));
    }
  }
  double t = seconds_since(t0);
  bool ok = worst1 <= 1e-5 && worst2 <= 1e-4 && t < 60;
  return {ok, fmt("parameters %s; first-order rel err %.2e (<= 1e-5), second-order %.2e (<= 1e-4), %.1f s",
                  sizes.c_str(), worst1, worst2, t)};
}

// ---- 2: inversion fidelity ------------------------------------------------------

data::Dataset mnist16() {
  return data::downsample_mnist(
      data::load_idx(kData / "mnist" / "mnist5k-images-idx3-ubyte", kData / "mnist" / "mnist5k-labels-idx1-ubyte"));
}

Verdict inversion_fidelity() {
  auto t0 = std::chrono::steady_clock::now();
  data::Dataset mnist = mnist16();
  ModelState m = ModelState::initialize(ArchitectureSpec::mlp_s(mnist.shape(), 10), derive_seed(1, "fidelity-model"));
  auto order = Rng(derive_seed(1, "fidelity-examples")).permutation(mnist.size());
  int correct = 0;
  std::vector<double> mses;
  for (std::size_t k = 0; k < 20; ++k) {
    std::vector<std::size_t> pick = {order[k]};
    data::Batch b = data::make_batch(mnist, pick);
    fed::InterceptedUpdate u;
    u.reference = m;
    u.gradient = nn::compute_gradients(m, b);
    inversion::InversionConfig cfg;
    cfg.seed = derive_seed(1, "fidelity-restarts", k);
    auto r = inversion::invert(u, cfg);
    correct += r.labels == b.labels;
    mses.push_back(inversion::pixel_mse(r.pixels, b.inputs));
  }
  std::sort(mses.begin(), mses.end());
  double median = 0.5 * (mses[9] + mses[10]);
  double t = seconds_since(t0);
  bool ok = correct >= 18 && median < 1e-2 && t < 600;
  return {ok, fmt("MLP-S, batch 1: labels %d/20 (>= 18), median pixel MSE %.2e (< 1e-2), worst %.2e, %.1f s",
                  correct, median, mses.back(), t)};
}

// ---- 3-6: scenarios ---------------------------------------------------------------

struct Run {
  std::vector<fed::RoundRecord> records;
  std::string metrics;
  double seconds = 0;
  int attack_start = 0;
};

class Runs {
 public:
  explicit Runs(fs::path work) : work_(std::move(work)) {}

  const Run& get(const std::string& profile, experiments::Arm arm, std::size_t threads = 1) {
    std::string key = profile + "/" + std::string(experiments::arm_name(arm)) + "/t" + std::to_string(threads);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    experiments::ConfigOverrides o = {
        {"scenario.arm", std::string(experiments::arm_name(arm))},
        {"participants.attackers", arm == experiments::Arm::kBaseline ? "0" : "1"},
        {"scenario.output_dir", (work_ / key).string()},
        {"output.dump_images", "false"}};
    auto cfg = experiments::load_config(kConfigs / (profile + ".ini"), o);
    experiments::ScenarioOptions opts;
    opts.threads = threads;
    auto t0 = std::chrono::steady_clock::now();
    auto r = experiments::run_scenario(cfg, opts);
    Run run;
    run.seconds = seconds_since(t0);
    run.records = r.records;
    std::ifstream in(r.metrics, std::ios::binary);
    run.metrics.assign(std::istreambuf_iterator<char>(in), {});
    run.attack_start = cfg.attack_start_round;
    std::fprintf(stderr, "  [%s: final accuracy %.4f, %.0f s]\n", key.c_str(), r.final_accuracy, run.seconds);
    return cache_.emplace(key, std::move(run)).first->second;
  }

 private:
  fs::path work_;
  std::map<std::string, Run> cache_;
};

double final_acc(const Run& r) { return r.records.back().accuracy; }

Verdict baseline_federation(Runs& runs) {
  const Run& m = runs.get("mnist-small", experiments::Arm::kBaseline);
  const Run& s = runs.get("signs-small", experiments::Arm::kBaseline);
  bool ok = m.records.size() == 30 && s.records.size() == 30 && final_acc(m) >= 0.90 && final_acc(s) >= 0.92 &&
            m.seconds < 900 && s.seconds < 900;
  return {ok, fmt("30 rounds, 9 benign: mnist-small %.4f (>= 0.90, %.0f s), signs-small %.4f (>= 0.92, %.0f s)",
                  final_acc(m), m.seconds, final_acc(s), s.seconds)};
}

Verdict inversion_only(Runs& runs) {
  std::string detail;
  bool ok = true;
  for (const char* p : {"mnist-small", "signs-small"}) {
    const Run& b = runs.get(p, experiments::Arm::kBaseline);
    const Run& i = runs.get(p, experiments::Arm::kInversionOnly);
    double gap = final_acc(b) - final_acc(i);
    ok = ok && std::abs(gap) <= 0.02 && i.seconds < 900;
    detail += fmt("%s%s baseline %.4f vs inversion-only %.4f (gap %+.4f, |gap| <= 0.02)", detail.empty() ? "" : "; ",
                  p, final_acc(b), final_acc(i), gap);
  }
  return {ok, detail};
}

Verdict spin_degradation(Runs& runs) {
  std::string detail;
  bool ok = true;
  for (const char* p : {"mnist-small", "signs-small"}) {
    const Run& b = runs.get(p, experiments::Arm::kBaseline);
    const Run& s = runs.get(p, experiments::Arm::kSpin);
    double drop = final_acc(b) - final_acc(s);
    double pre = 0;
    int onset = 0;
    for (std::size_t k = 0; k < s.records.size(); ++k) {
      double d = b.records[k].accuracy - s.records[k].accuracy;
      if (s.records[k].round < s.attack_start) pre = std::max(pre, std::abs(d));
      if (!onset && d > 0.02) onset = s.records[k].round;
    }
    bool here = drop >= 0.10 && pre <= 0.02 && (onset == 0 || onset >= s.attack_start);
    ok = ok && here;
    detail += fmt("%s%s drop %.4f (>= 0.10), pre-attack max gap %.4f (<= 0.02), onset %s", detail.empty() ? "" : "; ", p,
                  drop, pre, onset ? std::to_string(onset).c_str() : "none");
  }
  return {ok, detail};
}

Verdict determinism(Runs& runs, const fs::path& work) {
  bool ok = true;
  std::string detail;
  for (const char* p : {"signs-small", "mnist-small"}) {
    for (auto arm : {experiments::Arm::kBaseline, experiments::Arm::kSpin}) {
      if (std::string(p) == "mnist-small" && arm == experiments::Arm::kSpin) continue;
      const Run& one = runs.get(p, arm, 1);
      const Run& four = runs.get(p, arm, 4);
      bool same = one.metrics == four.metrics && !one.metrics.empty();
      ok = ok && same;
      detail += fmt("%s%s/%s threads 1 vs 4 %s", detail.empty() ? "" : "; ", p,
                    std::string(experiments::arm_name(arm)).c_str(), same ? "identical" : "DIFFER");
    }
  }
  // Plain rerun into a fresh directory.
  Runs again(work / "rerun");
  const Run& r = again.get("signs-small", experiments::Arm::kSpin, 1);
  bool same = r.metrics == runs.get("signs-small", experiments::Arm::kSpin, 1).metrics;
  ok = ok && same;
  detail += fmt("; signs-small/spin rerun %s", same ? "identical" : "DIFFER");
  return {ok, detail};
}

// ---- 7: aggregation algebra ----------------------------------------------------

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](double x, double y) {
           return std::bit_cast<std::uint64_t>(x) == std::bit_cast<std::uint64_t>(y);
         });
}

Verdict aggregation_algebra() {
  Rng rng(derive_seed(1, "aggregation-properties"));
  int idem = 0, perm = 0, trials = 30;
  double worst = 0;
  for (int t = 0; t < trials; ++t) {
    ArchitectureSpec arch = (t % 2) ? ArchitectureSpec::reference("conv-s", {1, 16, 16}, 10)
                                    : ArchitectureSpec::reference("mlp-s", {1, 16, 16}, 10);
    std::size_t n = 2 + rng.below(9);
    std::vector<ModelState> models;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> flat(arch.parameter_count());
      double scale = std::pow(10.0, rng.uniform(-3, 3));
      for (double& x : flat) x = scale * (2 * rng.uniform() - 1);
      models.push_back(from_flat(arch, flat));
    }
    std::vector<ModelState> same(n, models[0]);
    idem += bit_equal(fed::aggregate_models(same).flatten(), models[0].flatten());
    auto mean = fed::aggregate_models(models).flatten();
    std::vector<ModelState> shuffled = models;
    rng.shuffle(std::span<ModelState>(shuffled));
    perm += bit_equal(fed::aggregate_models(shuffled).flatten(), mean);
    fed::RunningMean running;
    for (const auto& m : models) running.add(m);
    auto seq = running.result().flatten();
    for (std::size_t k = 0; k < mean.size(); ++k) worst = std::max(worst, std::abs(seq[k] - mean[k]));
  }
  bool ok = idem == trials && perm == trials && worst <= 1e-12;
  return {ok, fmt("%d random model lists: idempotent %d/%d (bit-exact), permutation-invariant %d/%d (bit-exact), "
                  "running vs batch mean max diff %.2e (<= 1e-12)",
                  trials, idem, trials, perm, trials, worst)};
}

// ---- 8: formats -------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

ErrorCode idx_error(const fs::path& images, const fs::path& labels) {
  try {
    data::load_idx(images, labels);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInvalidArgument;
}

Verdict formats(const fs::path& work) {
  fs::create_directories(work);
  int exact = 0, total = 0;
  for (const char* name : {"mlp-s", "conv-s"}) {
    ArchitectureSpec arch = ArchitectureSpec::reference(name, {1, 16, 16}, 10);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      std::vector<double> flat = uniform(arch.parameter_count(), seed, -1e3, 1e3);
      flat[0] = 1e-310;  // subnormal
      flat[1] = -0.0;
      ModelState m = from_flat(arch, flat);
      fs::path ck = work / (std::string(name) + std::to_string(seed) + ".ckpt");
      nn::save_checkpoint(m, ck);
      exact += bit_equal(nn::load_checkpoint(ck).flatten(), flat);
      nn::GradientVector g;
      for (const auto& p : m.parameters()) g.entries.push_back(p);
      fs::path gd = work / (std::string(name) + std::to_string(seed) + ".grad");
      nn::save_gradient(g, arch, gd);
      auto back = nn::load_gradient(gd);
      exact += bit_equal(back.gradient.flatten(), flat) && back.architecture == arch;
      total += 2;
    }
  }
  fs::path img = kData / "mnist" / "mnist5k-images-idx3-ubyte";
  fs::path lab = kData / "mnist" / "mnist5k-labels-idx1-ubyte";
  std::string ib = slurp(img), lb = slurp(lab);
  auto variant = [&](const std::string& tag, std::string bytes) {
    fs::path p = work / tag;
    spit(p, bytes);
    return p;
  };
  std::string bad_img = ib;
  bad_img[3] = 0x01;
  std::string bad_lab = lb;
  bad_lab[2] = 0x09;
  std::string short_count = lb;
  short_count[7] = static_cast<char>(static_cast<unsigned char>(short_count[7]) - 1);
  std::map<std::string, std::pair<ErrorCode, ErrorCode>> cases = {
      {"image magic", {idx_error(variant("img_magic", bad_img), lab), ErrorCode::kBadMagic}},
      {"label magic", {idx_error(img, variant("lab_magic", bad_lab)), ErrorCode::kBadMagic}},
      {"count", {idx_error(img, variant("lab_count", short_count.substr(0, short_count.size() - 1))),
                 ErrorCode::kCountMismatch}},
      {"truncation", {idx_error(variant("img_trunc", ib.substr(0, ib.size() - 10)), lab), ErrorCode::kTruncatedFile}},
  };
  int rejected = 0;
  std::string which;
  for (const auto& [tag, codes] : cases) {
    bool good = codes.first == codes.second;
    rejected += good;
    which += fmt("%s%s->%s", which.empty() ? "" : ", ", tag.c_str(), std::string(error_code_name(codes.first)).c_str());
  }
  bool ok = exact == total && rejected == static_cast<int>(cases.size());
  return {ok, fmt("%d/%d checkpoint+gradient round trips bit-exact; IDX corruptions rejected %d/%zu (%s)", exact, total,
                  rejected, cases.size(), which.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  bool strict = false;
  fs::path work = fs::temp_directory_path() / ("spin_acceptance_" + std::to_string(::getpid()));
  bool keep = false;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--strict") {
      strict = true;
    } else if (a == "--only" && i + 1 < argc) {
      std::stringstream s(argv[++i]);
      std::string n;
      while (std::getline(s, n, ',')) only.insert(std::stoi(n));
    } else if (a == "--work" && i + 1 < argc) {
      work = argv[++i];
      keep = true;
    } else {
      std::fprintf(stderr, "usage: %s [--only N[,N...]] [--strict] [--work DIR]\n", argv[0]);
      return 2;
    }
  }
  fs::create_directories(work);
  Runs runs(work / "runs");
  const std::vector<std::pair<int, std::function<Verdict()>>> criteria = {
      {1, gradient_oracles},
      {2, inversion_fidelity},
      {3, [&] { return baseline_federation(runs); }},
      {4, [&] { return inversion_only(runs); }},
      {5, [&] { return spin_degradation(runs); }},
      {6, [&] { return determinism(runs, work); }},
      {7, aggregation_algebra},
      {8, [&] { return formats(work / "formats"); }},
  };
  int failed = 0, run = 0;
  for (const auto& [id, check] : criteria) {
    if (!only.empty() && !only.count(id)) continue;
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    ++run;
    failed += !v.pass;
    std::printf("AC%d %s  %s\n", id, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", run - failed, run);
  if (!keep) {
    std::error_code ec;
    fs::remove_all(work, ec);
  }
  return strict && failed ? 1 : 0;
}
