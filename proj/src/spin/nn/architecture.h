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

#ifndef SPIN_NN_ARCHITECTURE_H_
#define SPIN_NN_ARCHITECTURE_H_

#include <string>
#include <string_view>
#include <vector>

#include "spin/autodiff/tensor.h"
#include "spin/data/dataset.h"

namespace spin::nn {

enum class LayerKind { kAffine, kConv, kMeanPool, kSigmoid, kTanh, kRelu };

struct LayerSpec {
  LayerKind kind = LayerKind::kAffine;
  std::size_t width = 0;   // affine outputs or conv filters
  std::size_t kernel = 0;  // conv only; stride is always 1

  bool operator==(const LayerSpec&) const = default;
};

struct ParamSpec {
  std::string name;
  ad::Shape shape;
  std::size_t fan_in = 0;
  std::size_t fan_out = 0;
  bool is_bias = false;
};

// Layer list applied to channels-last images. An affine layer flattens any
// image input first; the final layer must be affine with `classes` outputs.
struct ArchitectureSpec {
  data::ImageShape input;
  std::vector<LayerSpec> layers;
  std::size_t classes = 0;

  // flatten -> affine(hidden) -> sigmoid -> affine(classes)
  static ArchitectureSpec mlp_s(data::ImageShape input, std::size_t classes,
                                std::size_t hidden = 64);
  // conv(k x k, stride 1, filters) -> sigmoid -> 2x2 mean-pool -> affine(classes)
  static ArchitectureSpec conv_s(data::ImageShape input, std::size_t classes,
                                 std::size_t filters = 8, std::size_t kernel = 3);
  // "mlp-s" or "conv-s".
  static ArchitectureSpec reference(std::string_view name, data::ImageShape input,
                                    std::size_t classes);

  // Raises ShapeMismatch for a broken chain and NonSmoothOpRequested for
  // non-smooth activations.
  void validate() const;

  std::vector<ParamSpec> parameter_specs() const;
  std::size_t parameter_count() const;
  // Width of the input to the final affine layer.
  std::size_t feature_width() const;

  // "input=1x16x16 classes=10 layers=affine:64,sigmoid,affine:10"
  std::string to_string() const;
  static ArchitectureSpec parse(std::string_view text);

  bool operator==(const ArchitectureSpec&) const = default;
};

}  // namespace spin::nn

#endif  // SPIN_NN_ARCHITECTURE_H_
