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

#include "spin/data/dataset.h"

#include <numeric>

#include "spin/common/error.h"

namespace spin::data {

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kReal: return "real";
    case Provenance::kReconstructed: return "reconstructed";
    case Provenance::kPoisoned: return "poisoned";
  }
  return "unknown";
}

std::string_view split_name(SplitTag s) {
  switch (s) {
    case SplitTag::kAll: return "all";
    case SplitTag::kTrain: return "train";
    case SplitTag::kVal: return "val";
    case SplitTag::kTest: return "test";
  }
  return "unknown";
}

Example make_example(std::uint64_t id, std::vector<double> pixels, int label,
                     Provenance provenance) {
  Example e;
  e.id = id;
  e.pixels = std::make_shared<const std::vector<double>>(std::move(pixels));
  e.label = label;
  e.provenance = provenance;
  return e;
}

Dataset::Dataset(std::string name, std::size_t classes, ImageShape shape,
                 std::vector<Example> examples, SplitTag split, std::string source)
    : name_(std::move(name)),
      classes_(classes),
      shape_(shape),
      examples_(std::move(examples)),
      split_(split),
      source_(std::move(source)) {
  if (classes_ < 1) fail(ErrorCode::kInvalidArgument, name_ + ": class count must be >= 1");
  for (const Example& e : examples_) {
    if (!e.pixels || e.pixels->size() != shape_.size()) {
      fail(ErrorCode::kShapeMismatch,
           name_ + ": example " + std::to_string(e.id) + " has the wrong pixel count");
    }
    for (double v : *e.pixels) {
      if (!(v >= 0.0 && v <= 1.0)) {
        fail(ErrorCode::kInvalidArgument,
             name_ + ": example " + std::to_string(e.id) + " has a pixel outside [0, 1]");
      }
    }
    if (e.label != kNoLabel && (e.label < 0 || static_cast<std::size_t>(e.label) >= classes_)) {
      fail(ErrorCode::kInvalidArgument,
           name_ + ": example " + std::to_string(e.id) + " label " +
               std::to_string(e.label) + " out of range");
    }
  }
}

Dataset Dataset::subset(std::span<const std::size_t> indices, std::string name) const {
  std::vector<Example> picked;
  picked.reserve(indices.size());
  for (std::size_t i : indices) picked.push_back(examples_.at(i));
  Dataset out = *this;
  out.name_ = std::move(name);
  out.examples_ = std::move(picked);
  return out;
}

Dataset Dataset::with_split(SplitTag split) const {
  Dataset out = *this;
  out.split_ = split;
  return out;
}

Dataset Dataset::with_name(std::string name) const {
  Dataset out = *this;
  out.name_ = std::move(name);
  return out;
}

Dataset Dataset::relabeled(std::span<const int> labels, Provenance provenance) const {
  if (labels.size() != examples_.size()) {
    fail(ErrorCode::kShapeMismatch, name_ + ": relabel count mismatch");
  }
  std::vector<Example> out = examples_;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].label = labels[i];
    out[i].provenance = provenance;
  }
  return Dataset(name_, classes_, shape_, std::move(out), split_, source_);
}

Batch make_batch(const Dataset& dataset, std::span<const std::size_t> indices) {
  if (indices.empty()) fail(ErrorCode::kInvalidArgument, "batch must hold at least one example");
  const ImageShape& s = dataset.shape();
  std::vector<double> values;
  values.reserve(indices.size() * s.size());
  Batch batch;
  batch.labels.reserve(indices.size());
  for (std::size_t i : indices) {
    const Example& e = dataset[i];
    values.insert(values.end(), e.pixels->begin(), e.pixels->end());
    batch.labels.push_back(e.label);
  }
  batch.inputs = ad::Tensor::constant({indices.size(), s.height, s.width, s.channels},
                                      std::move(values));
  return batch;
}

Batch make_batch(const Dataset& dataset) {
  std::vector<std::size_t> all(dataset.size());
  std::iota(all.begin(), all.end(), 0);
  return make_batch(dataset, all);
}

std::vector<Example> unstack(const Batch& batch, Provenance provenance) {
  std::size_t n = batch.size();
  std::size_t per = n ? batch.inputs.numel() / n : 0;
  std::vector<Example> out;
  out.reserve(n);
  const auto values = batch.inputs.values();
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> px(values.begin() + static_cast<std::ptrdiff_t>(i * per),
                           values.begin() + static_cast<std::ptrdiff_t>((i + 1) * per));
    int label = i < batch.labels.size() ? batch.labels[i] : kNoLabel;
    out.push_back(make_example(i, std::move(px), label, provenance));
  }
  return out;
}

}  // namespace spin::data
