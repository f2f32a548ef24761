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

#ifndef SPIN_AUTODIFF_TENSOR_H_
#define SPIN_AUTODIFF_TENSOR_H_

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace spin::ad {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string shape_str(const Shape& shape);

// Operation tags recorded on graph nodes. kRelu and kMaxPool exist only so
// that requesting them can be rejected; they have no kernels.
enum class OpKind {
  kLeaf,
  kAdd,
  kSub,
  kMul,
  kMatMul,
  kSigmoid,
  kTanh,
  kSoftmax,
  kLogSumExp,
  kMean,
  kSum,
  kSquare,
  kMeanPool,
  kUnpool,
  kReshape,
  kIm2Col,
  kCol2Im,
  kBroadcastScalar,
  kBroadcastRow,
  kSumToRow,
  kRowSum,
  kBroadcastCol,
  kRelu,
  kMaxPool,
};

const char* op_name(OpKind kind);

struct Storage {
  Shape shape;
  std::vector<double> values;
};

struct Node;

// Immutable value plus an optional handle into the graph that produced it.
// Copies share storage; nothing ever mutates a Storage after construction.
class Tensor {
 public:
  Tensor() = default;

  static Tensor constant(Shape shape, std::vector<double> values);
  static Tensor scalar(double value);
  static Tensor zeros(Shape shape);
  static Tensor full(Shape shape, double value);
  // A trainable leaf: recorded on a fresh graph root so it can appear in
  // the wrt list of backward().
  static Tensor leaf(Shape shape, std::vector<double> values);

  Tensor as_leaf() const;
  Tensor detach() const;

  bool defined() const { return storage_ != nullptr; }
  bool on_graph() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t numel() const { return storage_ ? storage_->values.size() : 0; }
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t i) const { return shape().at(i); }
  std::span<const double> values() const;
  const std::vector<double>& vector() const { return storage_->values; }
  double item() const;
  OpKind op() const;
  const Node* node() const { return node_.get(); }

 private:
  friend struct TensorAccess;

  Tensor(std::shared_ptr<const Storage> storage, std::shared_ptr<Node> node)
      : storage_(std::move(storage)), node_(std::move(node)) {}

  std::shared_ptr<const Storage> storage_;
  std::shared_ptr<Node> node_;
};

// Per-op attributes needed by kernels and backward rules.
struct OpAttrs {
  bool trans_a = false;
  bool trans_b = false;
  Shape shape;  // reshape/broadcast target, or the pre-op input shape
  std::size_t kernel = 0;
};

struct Node : std::enable_shared_from_this<Node> {
  OpKind kind = OpKind::kLeaf;
  std::vector<Tensor> inputs;
  std::shared_ptr<const Storage> output;
  OpAttrs attrs;
};

struct TensorAccess {
  static Tensor make(std::shared_ptr<const Storage> storage,
                     std::shared_ptr<Node> node) {
    return Tensor(std::move(storage), std::move(node));
  }
  static const std::shared_ptr<const Storage>& storage(const Tensor& t) {
    return t.storage_;
  }
  static const std::shared_ptr<Node>& node(const Tensor& t) { return t.node_; }
};

}  // namespace spin::ad

#endif  // SPIN_AUTODIFF_TENSOR_H_
