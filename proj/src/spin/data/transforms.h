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

#ifndef SPIN_DATA_TRANSFORMS_H_
#define SPIN_DATA_TRANSFORMS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "spin/data/dataset.h"

namespace spin::data {

struct SignSynthConfig {
  std::size_t count_per_class = 300;
  std::size_t image_size = 16;  // square, grayscale
  double noise = 0.3;           // additive uniform in [-noise, noise]
  std::uint64_t seed = 7;
};

inline constexpr std::size_t kSignClasses = 4;

// Four visually distinct sign classes rendered procedurally:
//   0  octagon outline
//   1  horizontal bar on a filled disc
//   2  ring with the glyphs "20"
//   3  ring with the glyphs "120"
// Every example is its class template plus seeded uniform noise, clamped to
// [0, 1]. Raises InvalidConfig for sizes below 12 or noise outside [0, 1].
Dataset synth_signs(const SignSynthConfig& config);

// Noise-free class template (image_size x image_size).
std::vector<double> sign_template(std::size_t cls, std::size_t image_size);

// Seeded shuffle followed by contiguous cuts at round(n * cumulative ratio).
// Ratios must be non-negative and sum to 1 within 1e-9 (BadRatios). Three
// parts are tagged train/val/test, two parts train/test.
std::vector<Dataset> split(const Dataset& dataset, std::span<const double> ratios,
                           std::uint64_t seed);

// IID shards of size n / count (the first n % count shards take one more).
std::vector<Dataset> partition_for_participants(const Dataset& dataset, std::size_t count,
                                                std::uint64_t seed);

// Replicates edge pixels outward by `pad` on every side.
Dataset pad_edge(const Dataset& dataset, std::size_t pad);

// 2x2 mean pooling of every image.
Dataset mean_pool2(const Dataset& dataset);

// 28x28 -> edge-pad to 32x32 -> 2x2 mean pool -> 16x16.
Dataset downsample_mnist(const Dataset& dataset);

}  // namespace spin::data

#endif  // SPIN_DATA_TRANSFORMS_H_
