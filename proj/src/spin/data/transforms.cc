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

#include "spin/data/transforms.h"

#include <algorithm>
#include <array>
#include <functional>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "spin/common/error.h"
#include "spin/common/rng.h"

namespace spin::data {
namespace {

// 3x5 bitmap digits, rows top to bottom.
constexpr std::array<std::array<const char*, 5>, 3> kGlyphs = {{
    {"###", "#.#", "#.#", "#.#", "###"},  // 0
    {".#.", "##.", ".#.", ".#.", "###"},  // 1
    {"###", "..#", "###", "#..", "###"},  // 2
}};

class Canvas {
 public:
  explicit Canvas(std::size_t size) : size_(size), px_(size * size, 0.0) {}

  void set(long r, long c, double v) {
    if (r < 0 || c < 0 || r >= static_cast<long>(size_) || c >= static_cast<long>(size_)) return;
    px_[static_cast<std::size_t>(r) * size_ + static_cast<std::size_t>(c)] = v;
  }

  template <typename Pred>
  void fill_where(Pred pred, double v) {
    double c = (static_cast<double>(size_) - 1.0) / 2.0;
    for (std::size_t r = 0; r < size_; ++r)
      for (std::size_t k = 0; k < size_; ++k)
        if (pred(static_cast<double>(r) - c, static_cast<double>(k) - c)) set(r, k, v);
  }

  void glyphs(const std::vector<int>& digits, double v) {
    std::size_t scale = std::max<std::size_t>(1, size_ / 16);
    long gw = 3 * static_cast<long>(scale), gh = 5 * static_cast<long>(scale);
    long gap = static_cast<long>(scale);
    long total = static_cast<long>(digits.size()) * gw + (static_cast<long>(digits.size()) - 1) * gap;
    long left = (static_cast<long>(size_) - total) / 2;
    long top = (static_cast<long>(size_) - gh) / 2;
    for (std::size_t d = 0; d < digits.size(); ++d) {
      long x0 = left + static_cast<long>(d) * (gw + gap);
      const auto& glyph = kGlyphs[static_cast<std::size_t>(digits[d])];
      for (long r = 0; r < gh; ++r)
        for (long c = 0; c < gw; ++c)
          if (glyph[static_cast<std::size_t>(r / static_cast<long>(scale))]
                   [static_cast<std::size_t>(c / static_cast<long>(scale))] == '#')
            set(top + r, x0 + c, v);
    }
  }

  std::vector<double> take() { return std::move(px_); }

 private:
  std::size_t size_;
  std::vector<double> px_;
};

}  // namespace

std::vector<double> sign_template(std::size_t cls, std::size_t image_size) {
  Canvas canvas(image_size);
  double s = static_cast<double>(image_size);
  double radius = 0.45 * s;
  double thickness = std::max(1.0, 0.07 * s);
  auto ring = [&](double y, double x) {
    double d = std::hypot(y, x);
    return d <= radius && d >= radius - thickness;
  };
  switch (cls) {
    case 0: {
      // Distance-like function of a regular octagon: max projection onto
      // the eight edge normals.
      double apothem = radius * std::cos(std::numbers::pi / 8.0);
      canvas.fill_where(
          [&](double y, double x) {
            double m = 0.0;
            for (int k = 0; k < 8; ++k) {
              double a = std::numbers::pi / 8.0 + k * std::numbers::pi / 4.0;
              m = std::max(m, x * std::cos(a) + y * std::sin(a));
            }
            return m <= apothem && m >= apothem - thickness;
          },
          1.0);
      break;
    }
    case 1:
      canvas.fill_where([&](double y, double x) { return std::hypot(y, x) <= radius; }, 0.5);
      canvas.fill_where(
          [&](double y, double x) {
            return std::abs(y) <= 0.1 * s && std::abs(x) <= 0.3 * s;
          },
          1.0);
      break;
    case 2:
      canvas.fill_where(ring, 0.5);
      canvas.glyphs({2, 0}, 1.0);
      break;
    case 3:
      canvas.fill_where(ring, 0.5);
      canvas.glyphs({1, 2, 0}, 1.0);
      break;
    default:
      fail(ErrorCode::kInvalidArgument, "sign class " + std::to_string(cls) + " out of range");
  }
  return canvas.take();
}

Dataset synth_signs(const SignSynthConfig& config) {
  if (config.image_size < 12) {
    fail(ErrorCode::kInvalidConfig, "synth_signs: image_size must be >= 12");
  }
  if (!(config.noise >= 0.0 && config.noise <= 1.0)) {
    fail(ErrorCode::kInvalidConfig, "synth_signs: noise must lie in [0, 1]");
  }
  if (config.count_per_class < 1) {
    fail(ErrorCode::kInvalidConfig, "synth_signs: count_per_class must be >= 1");
  }
  Rng rng(config.seed);
  std::vector<Example> examples;
  examples.reserve(kSignClasses * config.count_per_class);
  std::uint64_t id = 0;
  for (std::size_t cls = 0; cls < kSignClasses; ++cls) {
    std::vector<double> base = sign_template(cls, config.image_size);
    for (std::size_t i = 0; i < config.count_per_class; ++i) {
      std::vector<double> px = base;
      if (config.noise > 0.0) {
        for (double& p : px) p = std::clamp(p + rng.uniform(-config.noise, config.noise), 0.0, 1.0);
      }
      examples.push_back(make_example(id++, std::move(px), static_cast<int>(cls), Provenance::kReal));
    }
  }
  return Dataset("signs", kSignClasses, {1, config.image_size, config.image_size},
                 std::move(examples), SplitTag::kAll,
                 "synthetic signs seed=" + std::to_string(config.seed));
}

std::vector<Dataset> split(const Dataset& dataset, std::span<const double> ratios,
                           std::uint64_t seed) {
  if (ratios.empty()) fail(ErrorCode::kBadRatios, "no ratios given");
  double total = 0.0;
  for (double r : ratios) {
    if (!(r >= 0.0)) fail(ErrorCode::kBadRatios, "ratios must be non-negative");
    total += r;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    fail(ErrorCode::kBadRatios, "ratios sum to " + std::to_string(total) + ", expected 1");
  }
  Rng rng(seed);
  std::vector<std::size_t> order = rng.permutation(dataset.size());
  std::vector<Dataset> parts;
  std::size_t n = dataset.size();
  std::size_t begin = 0;
  double cumulative = 0.0;
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    cumulative += ratios[k];
    std::size_t end = k + 1 == ratios.size()
                          ? n
                          : std::min(n, static_cast<std::size_t>(std::llround(cumulative * static_cast<double>(n))));
    end = std::max(end, begin);
    std::span<const std::size_t> idx(order.data() + begin, end - begin);
    Dataset part = dataset.subset(idx, dataset.name() + "/part" + std::to_string(k));
    if (ratios.size() == 3) {
      static constexpr SplitTag kTags[3] = {SplitTag::kTrain, SplitTag::kVal, SplitTag::kTest};
      part = part.with_split(kTags[k]);
    } else if (ratios.size() == 2) {
      part = part.with_split(k == 0 ? SplitTag::kTrain : SplitTag::kTest);
    }
    parts.push_back(std::move(part));
    begin = end;
  }
  return parts;
}

std::vector<Dataset> partition_for_participants(const Dataset& dataset, std::size_t count,
                                                std::uint64_t seed) {
  if (count < 1) fail(ErrorCode::kInvalidArgument, "participant count must be >= 1");
  Rng rng(seed);
  std::vector<std::size_t> order = rng.permutation(dataset.size());
  std::size_t base = dataset.size() / count;
  std::size_t extra = dataset.size() % count;
  std::vector<Dataset> shards;
  std::size_t begin = 0;
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t len = base + (k < extra ? 1 : 0);
    std::span<const std::size_t> idx(order.data() + begin, len);
    shards.push_back(dataset.subset(idx, dataset.name() + "/shard" + std::to_string(k)));
    begin += len;
  }
  return shards;
}

namespace {

Dataset map_images(const Dataset& dataset, ImageShape out_shape,
                   const std::function<std::vector<double>(const std::vector<double>&)>& fn) {
  std::vector<Example> out;
  out.reserve(dataset.size());
  for (const Example& e : dataset.examples()) {
    Example copy = e;
    copy.pixels = std::make_shared<const std::vector<double>>(fn(*e.pixels));
    out.push_back(std::move(copy));
  }
  return Dataset(dataset.name(), dataset.classes(), out_shape, std::move(out), dataset.split(),
                 dataset.source());
}

}  // namespace

Dataset pad_edge(const Dataset& dataset, std::size_t pad) {
  ImageShape in = dataset.shape();
  ImageShape out{in.channels, in.height + 2 * pad, in.width + 2 * pad};
  return map_images(dataset, out, [&](const std::vector<double>& px) {
    std::vector<double> r(out.size());
    for (std::size_t y = 0; y < out.height; ++y) {
      std::size_t sy = std::clamp<long>(static_cast<long>(y) - static_cast<long>(pad), 0,
                                        static_cast<long>(in.height) - 1);
      for (std::size_t x = 0; x < out.width; ++x) {
        std::size_t sx = std::clamp<long>(static_cast<long>(x) - static_cast<long>(pad), 0,
                                          static_cast<long>(in.width) - 1);
        for (std::size_t c = 0; c < in.channels; ++c)
          r[(y * out.width + x) * in.channels + c] = px[(sy * in.width + sx) * in.channels + c];
      }
    }
    return r;
  });
}

Dataset mean_pool2(const Dataset& dataset) {
  ImageShape in = dataset.shape();
  ImageShape out{in.channels, in.height / 2, in.width / 2};
  return map_images(dataset, out, [&](const std::vector<double>& px) {
    std::vector<double> r(out.size());
    auto at = [&](std::size_t y, std::size_t x, std::size_t c) {
      return px[(y * in.width + x) * in.channels + c];
    };
    for (std::size_t y = 0; y < out.height; ++y)
      for (std::size_t x = 0; x < out.width; ++x)
        for (std::size_t c = 0; c < in.channels; ++c)
          r[(y * out.width + x) * in.channels + c] =
              0.25 * (at(2 * y, 2 * x, c) + at(2 * y, 2 * x + 1, c) + at(2 * y + 1, 2 * x, c) +
                      at(2 * y + 1, 2 * x + 1, c));
    return r;
  });
}

Dataset downsample_mnist(const Dataset& dataset) {
  if (dataset.shape().height != 28 || dataset.shape().width != 28) {
    fail(ErrorCode::kShapeMismatch, "downsample_mnist expects 28x28 images");
  }
  return mean_pool2(pad_edge(dataset, 2));
}

}  // namespace spin::data
