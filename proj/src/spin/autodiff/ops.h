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

#ifndef SPIN_AUTODIFF_OPS_H_
#define SPIN_AUTODIFF_OPS_H_

#include <span>
#include <vector>

#include "spin/autodiff/tensor.h"

namespace spin::ad {

// Generic entry point. Only ops with continuous second derivatives are
// accepted; kRelu/kMaxPool raise NonSmoothOpRequested. Ops that need
// attributes (reshape, matmul flags, pooling, patch extraction) take them
// through `attrs`.
Tensor forward_op(OpKind kind, std::span<const Tensor> inputs,
                  const OpAttrs& attrs = {});

// Elementwise binary ops. Permitted broadcasts: identical shapes, a
// one-element tensor against anything, and a row of shape (n) or (1, n)
// against an (m, n) matrix. Anything else is ShapeMismatch.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);

// op(a) * op(b) for 2-D tensors; op transposes when the flag is set.
Tensor matmul(const Tensor& a, const Tensor& b, bool trans_a = false,
              bool trans_b = false);

Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);
Tensor square(const Tensor& x);

// Row-wise on an (m, n) matrix.
Tensor softmax(const Tensor& x);
Tensor log_sum_exp(const Tensor& x);  // (m, 1)

// Full reductions to a rank-0 scalar.
Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);

Tensor reshape(const Tensor& x, Shape shape);

// x * weight + bias with bias broadcast across rows.
Tensor affine(const Tensor& x, const Tensor& weight, const Tensor& bias);

// Channels-last images (B, H, W, C).
Tensor mean_pool2(const Tensor& x);
// Stride-1 valid patches: (B, H, W, C) -> (B*(H-k+1)*(W-k+1), k*k*C), patch
// entries ordered (row offset, column offset, channel).
Tensor im2col(const Tensor& x, std::size_t kernel);

// Broadcast helpers with exact adjoint pairs.
Tensor broadcast_to(const Tensor& x, const Shape& shape);  // scalar or row
Tensor sum_to_row(const Tensor& x, const Shape& row_shape);  // (m,n) -> row
Tensor row_sum(const Tensor& x);                             // (m,n) -> (m,1)
Tensor broadcast_cols(const Tensor& x, std::size_t cols);    // (m,1) -> (m,n)

}  // namespace spin::ad

#endif  // SPIN_AUTODIFF_OPS_H_
