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

#ifndef SPIN_DATA_DATASET_H_
#define SPIN_DATA_DATASET_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spin/autodiff/tensor.h"

namespace spin::data {

enum class Provenance { kReal, kReconstructed, kPoisoned };

std::string_view provenance_name(Provenance p);

enum class SplitTag { kAll, kTrain, kVal, kTest };

std::string_view split_name(SplitTag s);

inline constexpr int kNoLabel = -1;

struct ImageShape {
  std::size_t channels = 1;
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t size() const { return channels * height * width; }
  bool operator==(const ImageShape&) const = default;
};

// Pixels are stored channels-last (H, W, C), which for the grayscale data
// used here coincides with (C, H, W).
struct Example {
  std::uint64_t id = 0;
  std::shared_ptr<const std::vector<double>> pixels;
  int label = kNoLabel;
  Provenance provenance = Provenance::kReal;
};

Example make_example(std::uint64_t id, std::vector<double> pixels, int label,
                     Provenance provenance);

// Immutable labelled collection. Construction enforces the pixel range
// [0, 1], a common image shape, and labels in [0, classes) (or kNoLabel).
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::string name, std::size_t classes, ImageShape shape,
          std::vector<Example> examples, SplitTag split = SplitTag::kAll,
          std::string source = {});

  const std::string& name() const { return name_; }
  std::size_t classes() const { return classes_; }
  const ImageShape& shape() const { return shape_; }
  const std::vector<Example>& examples() const { return examples_; }
  const Example& operator[](std::size_t i) const { return examples_.at(i); }
  std::size_t size() const { return examples_.size(); }
  bool empty() const { return examples_.empty(); }
  SplitTag split() const { return split_; }
  const std::string& source() const { return source_; }

  Dataset subset(std::span<const std::size_t> indices, std::string name) const;
  Dataset with_split(SplitTag split) const;
  Dataset with_name(std::string name) const;
  Dataset relabeled(std::span<const int> labels, Provenance provenance) const;

 private:
  std::string name_;
  std::size_t classes_ = 0;
  ImageShape shape_;
  std::vector<Example> examples_;
  SplitTag split_ = SplitTag::kAll;
  std::string source_;
};

struct Batch {
  ad::Tensor inputs;        // (B, H, W, C)
  std::vector<int> labels;  // hard labels, may be empty when soft labels are used
  ad::Tensor soft_labels;   // optional (B, classes), row-stochastic

  std::size_t size() const { return inputs.defined() ? inputs.dim(0) : 0; }
};

Batch make_batch(const Dataset& dataset, std::span<const std::size_t> indices);
Batch make_batch(const Dataset& dataset);

// Inverse of make_batch for hard-labelled batches.
std::vector<Example> unstack(const Batch& batch, Provenance provenance);

}  // namespace spin::data

#endif  // SPIN_DATA_DATASET_H_
