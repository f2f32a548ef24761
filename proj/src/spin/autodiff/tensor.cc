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

#include "spin/autodiff/tensor.h"

#include <cmath>
#include <sstream>

#include "spin/common/error.h"

namespace spin::ad {

std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ')';
  return os.str();
}

const char* op_name(OpKind kind) {
  switch (kind) {
    case OpKind::kLeaf: return "leaf";
    case OpKind::kAdd: return "add";
    case OpKind::kSub: return "subtract";
    case OpKind::kMul: return "multiply";
    case OpKind::kMatMul: return "matmul";
    case OpKind::kSigmoid: return "sigmoid";
    case OpKind::kTanh: return "tanh";
    case OpKind::kSoftmax: return "softmax";
    case OpKind::kLogSumExp: return "log-sum-exp";
    case OpKind::kMean: return "mean";
    case OpKind::kSum: return "sum";
    case OpKind::kSquare: return "square";
    case OpKind::kMeanPool: return "mean-pool";
    case OpKind::kUnpool: return "unpool";
    case OpKind::kReshape: return "reshape";
    case OpKind::kIm2Col: return "im2col";
    case OpKind::kCol2Im: return "col2im";
    case OpKind::kBroadcastScalar: return "broadcast-scalar";
    case OpKind::kBroadcastRow: return "broadcast-row";
    case OpKind::kSumToRow: return "sum-to-row";
    case OpKind::kRowSum: return "row-sum";
    case OpKind::kBroadcastCol: return "broadcast-col";
    case OpKind::kRelu: return "relu";
    case OpKind::kMaxPool: return "max-pool";
  }
  return "unknown";
}

namespace {

std::shared_ptr<const Storage> make_storage(Shape shape,
                                            std::vector<double> values) {
  if (numel(shape) != values.size()) {
    fail(ErrorCode::kShapeMismatch,
         "shape " + shape_str(shape) + " holds " +
             std::to_string(numel(shape)) + " values, got " +
             std::to_string(values.size()));
  }
  for (double v : values) {
    if (!std::isfinite(v)) fail(ErrorCode::kNonFiniteValue, "tensor value is not finite");
  }
  return std::make_shared<const Storage>(Storage{std::move(shape), std::move(values)});
}

const Shape kEmptyShape{};

}  // namespace

Tensor Tensor::constant(Shape shape, std::vector<double> values) {
  return Tensor(make_storage(std::move(shape), std::move(values)), nullptr);
}

Tensor Tensor::scalar(double value) { return constant({}, {value}); }

Tensor Tensor::zeros(Shape shape) { return full(std::move(shape), 0.0); }

Tensor Tensor::full(Shape shape, double value) {
  std::size_t n = ad::numel(shape);
  return constant(std::move(shape), std::vector<double>(n, value));
}

Tensor Tensor::leaf(Shape shape, std::vector<double> values) {
  return constant(std::move(shape), std::move(values)).as_leaf();
}

Tensor Tensor::as_leaf() const {
  auto node = std::make_shared<Node>();
  node->kind = OpKind::kLeaf;
  node->output = storage_;
  return Tensor(storage_, std::move(node));
}

Tensor Tensor::detach() const { return Tensor(storage_, nullptr); }

const Shape& Tensor::shape() const {
  return storage_ ? storage_->shape : kEmptyShape;
}

std::span<const double> Tensor::values() const {
  if (!storage_) return {};
  return storage_->values;
}

double Tensor::item() const {
  if (numel() != 1) {
    fail(ErrorCode::kShapeMismatch, "item() on tensor of shape " + shape_str(shape()));
  }
  return storage_->values[0];
}

OpKind Tensor::op() const { return node_ ? node_->kind : OpKind::kLeaf; }

}  // namespace spin::ad
