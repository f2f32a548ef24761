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

#include "spin/autodiff/ops.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "spin/common/error.h"

namespace spin::ad {
namespace {

[[noreturn]] void shape_error(const char* op, const Shape& a, const Shape& b) {
  fail(ErrorCode::kShapeMismatch, std::string(op) + ": incompatible shapes " +
                                      shape_str(a) + " and " + shape_str(b));
}

// Finalizes an op: checks finiteness and attaches a node when any input is
// on a graph.
Tensor record(OpKind kind, std::vector<Tensor> inputs, OpAttrs attrs,
              Shape shape, std::vector<double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      fail(ErrorCode::kNonFiniteValue,
           std::string(op_name(kind)) + " produced a non-finite value");
    }
  }
  auto storage =
      std::make_shared<const Storage>(Storage{std::move(shape), std::move(values)});
  bool tracked = std::any_of(inputs.begin(), inputs.end(),
                             [](const Tensor& t) { return t.on_graph(); });
  if (!tracked) return TensorAccess::make(std::move(storage), nullptr);
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->inputs = std::move(inputs);
  node->output = storage;
  node->attrs = std::move(attrs);
  return TensorAccess::make(std::move(storage), std::move(node));
}

void require_defined(const Tensor& t, const char* op) {
  if (!t.defined()) {
    fail(ErrorCode::kInvalidArgument, std::string(op) + ": undefined tensor");
  }
}

bool is_row_of(const Shape& row, const Shape& mat) {
  if (mat.size() != 2) return false;
  if (row.size() == 1) return row[0] == mat[1];
  return row.size() == 2 && row[0] == 1 && row[1] == mat[1];
}

enum class Bcast { kSame, kScalarA, kScalarB, kRowA, kRowB };

Bcast classify(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() == b.shape()) return Bcast::kSame;
  if (b.numel() == 1) return Bcast::kScalarB;
  if (a.numel() == 1) return Bcast::kScalarA;
  if (is_row_of(b.shape(), a.shape())) return Bcast::kRowB;
  if (is_row_of(a.shape(), b.shape())) return Bcast::kRowA;
  shape_error(op, a.shape(), b.shape());
}

template <typename F>
Tensor binary(OpKind kind, const Tensor& a, const Tensor& b, F f) {
  const char* name = op_name(kind);
  require_defined(a, name);
  require_defined(b, name);
  Bcast mode = classify(name, a, b);
  const auto av = a.values();
  const auto bv = b.values();
  Shape shape = (mode == Bcast::kScalarA || mode == Bcast::kRowA) ? b.shape() : a.shape();
  std::size_t n = numel(shape);
  std::vector<double> out(n);
  switch (mode) {
    case Bcast::kSame:
      for (std::size_t i = 0; i < n; ++i) out[i] = f(av[i], bv[i]);
      break;
    case Bcast::kScalarB:
      for (std::size_t i = 0; i < n; ++i) out[i] = f(av[i], bv[0]);
      break;
    case Bcast::kScalarA:
      for (std::size_t i = 0; i < n; ++i) out[i] = f(av[0], bv[i]);
      break;
    case Bcast::kRowB: {
      std::size_t cols = shape[1];
      for (std::size_t i = 0; i < n; ++i) out[i] = f(av[i], bv[i % cols]);
      break;
    }
    case Bcast::kRowA: {
      std::size_t cols = shape[1];
      for (std::size_t i = 0; i < n; ++i) out[i] = f(av[i % cols], bv[i]);
      break;
    }
  }
  return record(kind, {a, b}, {}, std::move(shape), std::move(out));
}

template <typename F>
Tensor unary(OpKind kind, const Tensor& x, F f) {
  require_defined(x, op_name(kind));
  const auto xv = x.values();
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = f(xv[i]);
  return record(kind, {x}, {}, x.shape(), std::move(out));
}

void require_matrix(const Tensor& x, const char* op) {
  require_defined(x, op);
  if (x.rank() != 2) {
    fail(ErrorCode::kShapeMismatch,
         std::string(op) + " expects a matrix, got " + shape_str(x.shape()));
  }
}

void require_image(const Tensor& x, const char* op) {
  require_defined(x, op);
  if (x.rank() != 4) {
    fail(ErrorCode::kShapeMismatch,
         std::string(op) + " expects (B, H, W, C), got " + shape_str(x.shape()));
  }
}

Tensor unpool(const Tensor& g, const Shape& input_shape);
Tensor col2im(const Tensor& cols, const Shape& image_shape, std::size_t kernel);

// Reduces a gradient of the broadcast result back onto an operand's shape.
Tensor unbroadcast(const Tensor& g, const Shape& target) {
  if (g.shape() == target) return g;
  if (numel(target) == 1) return reshape(sum(g), target);
  return sum_to_row(g, target);
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return binary(OpKind::kAdd, a, b, [](double x, double y) { return x + y; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary(OpKind::kSub, a, b, [](double x, double y) { return x - y; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary(OpKind::kMul, a, b, [](double x, double y) { return x * y; });
}

Tensor scale(const Tensor& a, double factor) {
  return mul(a, Tensor::scalar(factor));
}

Tensor matmul(const Tensor& a, const Tensor& b, bool trans_a, bool trans_b) {
  require_matrix(a, "matmul");
  require_matrix(b, "matmul");
  std::size_t m = trans_a ? a.dim(1) : a.dim(0);
  std::size_t k = trans_a ? a.dim(0) : a.dim(1);
  std::size_t kb = trans_b ? b.dim(1) : b.dim(0);
  std::size_t n = trans_b ? b.dim(0) : b.dim(1);
  if (k != kb) shape_error("matmul", a.shape(), b.shape());
  const double* A = a.values().data();
  const double* B = b.values().data();
  std::vector<double> out(m * n, 0.0);
  double* C = out.data();
  if (!trans_a && !trans_b) {
    for (std::size_t i = 0; i < m; ++i) {
      double* crow = C + i * n;
      for (std::size_t p = 0; p < k; ++p) {
        double av = A[i * k + p];
        if (av == 0.0) continue;
        const double* brow = B + p * n;
        for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
      }
    }
  } else if (!trans_a && trans_b) {
    for (std::size_t i = 0; i < m; ++i) {
      const double* arow = A + i * k;
      for (std::size_t j = 0; j < n; ++j) {
        const double* brow = B + j * k;
        double acc = 0.0;
        for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
        C[i * n + j] = acc;
      }
    }
  } else if (trans_a && !trans_b) {
    for (std::size_t p = 0; p < k; ++p) {
      const double* arow = A + p * m;
      const double* brow = B + p * n;
      for (std::size_t i = 0; i < m; ++i) {
        double av = arow[i];
        if (av == 0.0) continue;
        double* crow = C + i * n;
        for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
      }
    }
  } else {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t p = 0; p < k; ++p) acc += A[p * m + i] * B[j * k + p];
        C[i * n + j] = acc;
      }
    }
  }
  OpAttrs attrs;
  attrs.trans_a = trans_a;
  attrs.trans_b = trans_b;
  return record(OpKind::kMatMul, {a, b}, attrs, {m, n}, std::move(out));
}

Tensor sigmoid(const Tensor& x) {
  return unary(OpKind::kSigmoid, x, [](double v) {
    if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
    double e = std::exp(v);
    return e / (1.0 + e);
  });
}

Tensor tanh(const Tensor& x) {
  return unary(OpKind::kTanh, x, [](double v) { return std::tanh(v); });
}

Tensor square(const Tensor& x) {
  return unary(OpKind::kSquare, x, [](double v) { return v * v; });
}

Tensor softmax(const Tensor& x) {
  require_matrix(x, "softmax");
  std::size_t m = x.dim(0), n = x.dim(1);
  const auto xv = x.values();
  std::vector<double> out(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = xv.data() + i * n;
    double mx = *std::max_element(row, row + n);
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      out[i * n + j] = std::exp(row[j] - mx);
      z += out[i * n + j];
    }
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] /= z;
  }
  return record(OpKind::kSoftmax, {x}, {}, x.shape(), std::move(out));
}

Tensor log_sum_exp(const Tensor& x) {
  require_matrix(x, "log-sum-exp");
  std::size_t m = x.dim(0), n = x.dim(1);
  const auto xv = x.values();
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = xv.data() + i * n;
    double mx = *std::max_element(row, row + n);
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) z += std::exp(row[j] - mx);
    out[i] = mx + std::log(z);
  }
  return record(OpKind::kLogSumExp, {x}, {}, {m, 1}, std::move(out));
}

Tensor sum(const Tensor& x) {
  require_defined(x, "sum");
  double acc = 0.0;
  for (double v : x.values()) acc += v;
  return record(OpKind::kSum, {x}, {}, {}, {acc});
}

Tensor mean(const Tensor& x) {
  require_defined(x, "mean");
  if (x.numel() == 0) fail(ErrorCode::kShapeMismatch, "mean of an empty tensor");
  double acc = 0.0;
  for (double v : x.values()) acc += v;
  return record(OpKind::kMean, {x}, {}, {}, {acc / static_cast<double>(x.numel())});
}

Tensor reshape(const Tensor& x, Shape shape) {
  require_defined(x, "reshape");
  if (numel(shape) != x.numel()) shape_error("reshape", x.shape(), shape);
  if (shape == x.shape()) return x;
  OpAttrs attrs;
  attrs.shape = shape;
  return record(OpKind::kReshape, {x}, attrs, std::move(shape), x.vector());
}

Tensor affine(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  return add(matmul(x, weight), bias);
}

Tensor mean_pool2(const Tensor& x) {
  require_image(x, "mean-pool");
  std::size_t B = x.dim(0), H = x.dim(1), W = x.dim(2), C = x.dim(3);
  std::size_t Ho = H / 2, Wo = W / 2;
  if (Ho == 0 || Wo == 0) shape_error("mean-pool", x.shape(), {B, Ho, Wo, C});
  const auto xv = x.values();
  std::vector<double> out(B * Ho * Wo * C);
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t i = 0; i < Ho; ++i)
      for (std::size_t j = 0; j < Wo; ++j)
        for (std::size_t c = 0; c < C; ++c) {
          auto at = [&](std::size_t r, std::size_t s) {
            return xv[((b * H + r) * W + s) * C + c];
          };
          out[((b * Ho + i) * Wo + j) * C + c] =
              0.25 * (at(2 * i, 2 * j) + at(2 * i, 2 * j + 1) +
                      at(2 * i + 1, 2 * j) + at(2 * i + 1, 2 * j + 1));
        }
  OpAttrs attrs;
  attrs.shape = x.shape();
  return record(OpKind::kMeanPool, {x}, attrs, {B, Ho, Wo, C}, std::move(out));
}

Tensor im2col(const Tensor& x, std::size_t kernel) {
  require_image(x, "im2col");
  std::size_t B = x.dim(0), H = x.dim(1), W = x.dim(2), C = x.dim(3);
  if (kernel == 0 || kernel > H || kernel > W) {
    fail(ErrorCode::kShapeMismatch, "im2col: kernel " + std::to_string(kernel) +
                                        " does not fit " + shape_str(x.shape()));
  }
  std::size_t Ho = H - kernel + 1, Wo = W - kernel + 1;
  std::size_t cols = kernel * kernel * C;
  const auto xv = x.values();
  std::vector<double> out(B * Ho * Wo * cols);
  std::size_t r = 0;
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t i = 0; i < Ho; ++i)
      for (std::size_t j = 0; j < Wo; ++j, ++r) {
        double* dst = out.data() + r * cols;
        for (std::size_t di = 0; di < kernel; ++di)
          for (std::size_t dj = 0; dj < kernel; ++dj)
            for (std::size_t c = 0; c < C; ++c)
              *dst++ = xv[((b * H + i + di) * W + j + dj) * C + c];
      }
  OpAttrs attrs;
  attrs.shape = x.shape();
  attrs.kernel = kernel;
  return record(OpKind::kIm2Col, {x}, attrs, {B * Ho * Wo, cols}, std::move(out));
}

Tensor broadcast_to(const Tensor& x, const Shape& shape) {
  require_defined(x, "broadcast");
  if (x.shape() == shape) return x;
  OpAttrs attrs;
  attrs.shape = shape;
  std::size_t n = numel(shape);
  if (x.numel() == 1) {
    return record(OpKind::kBroadcastScalar, {x}, attrs, shape,
                  std::vector<double>(n, x.values()[0]));
  }
  if (is_row_of(x.shape(), shape)) {
    std::vector<double> out(n);
    std::size_t cols = shape[1];
    const auto xv = x.values();
    for (std::size_t i = 0; i < n; ++i) out[i] = xv[i % cols];
    return record(OpKind::kBroadcastRow, {x}, attrs, shape, std::move(out));
  }
  shape_error("broadcast", x.shape(), shape);
}

Tensor sum_to_row(const Tensor& x, const Shape& row_shape) {
  require_matrix(x, "sum-to-row");
  if (!is_row_of(row_shape, x.shape())) shape_error("sum-to-row", x.shape(), row_shape);
  std::size_t m = x.dim(0), n = x.dim(1);
  const auto xv = x.values();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j] += xv[i * n + j];
  OpAttrs attrs;
  attrs.shape = x.shape();
  return record(OpKind::kSumToRow, {x}, attrs, row_shape, std::move(out));
}

Tensor row_sum(const Tensor& x) {
  require_matrix(x, "row-sum");
  std::size_t m = x.dim(0), n = x.dim(1);
  const auto xv = x.values();
  std::vector<double> out(m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i] += xv[i * n + j];
  return record(OpKind::kRowSum, {x}, {}, {m, 1}, std::move(out));
}

Tensor broadcast_cols(const Tensor& x, std::size_t cols) {
  require_matrix(x, "broadcast-col");
  if (x.dim(1) != 1) shape_error("broadcast-col", x.shape(), {x.dim(0), cols});
  std::size_t m = x.dim(0);
  const auto xv = x.values();
  std::vector<double> out(m * cols);
  for (std::size_t i = 0; i < m; ++i)
    std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(i * cols), cols, xv[i]);
  OpAttrs attrs;
  attrs.shape = {m, cols};
  return record(OpKind::kBroadcastCol, {x}, attrs, {m, cols}, std::move(out));
}

namespace {

Tensor unpool(const Tensor& g, const Shape& input_shape) {
  require_image(g, "unpool");
  std::size_t B = input_shape[0], H = input_shape[1], W = input_shape[2],
              C = input_shape[3];
  std::size_t Ho = H / 2, Wo = W / 2;
  if (g.shape() != Shape{B, Ho, Wo, C}) shape_error("unpool", g.shape(), input_shape);
  const auto gv = g.values();
  std::vector<double> out(B * H * W * C, 0.0);
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t i = 0; i < Ho; ++i)
      for (std::size_t j = 0; j < Wo; ++j)
        for (std::size_t c = 0; c < C; ++c) {
          double v = 0.25 * gv[((b * Ho + i) * Wo + j) * C + c];
          for (std::size_t di = 0; di < 2; ++di)
            for (std::size_t dj = 0; dj < 2; ++dj)
              out[((b * H + 2 * i + di) * W + 2 * j + dj) * C + c] = v;
        }
  OpAttrs attrs;
  attrs.shape = input_shape;
  return record(OpKind::kUnpool, {g}, attrs, input_shape, std::move(out));
}

Tensor col2im(const Tensor& cols, const Shape& image_shape, std::size_t kernel) {
  require_matrix(cols, "col2im");
  std::size_t B = image_shape[0], H = image_shape[1], W = image_shape[2],
              C = image_shape[3];
  std::size_t Ho = H - kernel + 1, Wo = W - kernel + 1;
  std::size_t width = kernel * kernel * C;
  if (cols.shape() != Shape{B * Ho * Wo, width}) {
    shape_error("col2im", cols.shape(), image_shape);
  }
  const auto cv = cols.values();
  std::vector<double> out(B * H * W * C, 0.0);
  std::size_t r = 0;
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t i = 0; i < Ho; ++i)
      for (std::size_t j = 0; j < Wo; ++j, ++r) {
        const double* src = cv.data() + r * width;
        for (std::size_t di = 0; di < kernel; ++di)
          for (std::size_t dj = 0; dj < kernel; ++dj)
            for (std::size_t c = 0; c < C; ++c)
              out[((b * H + i + di) * W + j + dj) * C + c] += *src++;
      }
  OpAttrs attrs;
  attrs.shape = image_shape;
  attrs.kernel = kernel;
  return record(OpKind::kCol2Im, {cols}, attrs, image_shape, std::move(out));
}

}  // namespace

Tensor forward_op(OpKind kind, std::span<const Tensor> inputs, const OpAttrs& attrs) {
  auto arity = [&](std::size_t n) {
    if (inputs.size() != n) {
      fail(ErrorCode::kInvalidArgument,
           std::string(op_name(kind)) + " takes " + std::to_string(n) +
               " inputs, got " + std::to_string(inputs.size()));
    }
  };
  switch (kind) {
    case OpKind::kRelu:
    case OpKind::kMaxPool:
      fail(ErrorCode::kNonSmoothOpRequested,
           std::string(op_name(kind)) +
               " has no continuous second derivative; use sigmoid/tanh or mean-pool");
    case OpKind::kLeaf:
      arity(1);
      return inputs[0].as_leaf();
    case OpKind::kAdd: arity(2); return add(inputs[0], inputs[1]);
    case OpKind::kSub: arity(2); return sub(inputs[0], inputs[1]);
    case OpKind::kMul: arity(2); return mul(inputs[0], inputs[1]);
    case OpKind::kMatMul:
      arity(2);
      return matmul(inputs[0], inputs[1], attrs.trans_a, attrs.trans_b);
    case OpKind::kSigmoid: arity(1); return sigmoid(inputs[0]);
    case OpKind::kTanh: arity(1); return tanh(inputs[0]);
    case OpKind::kSoftmax: arity(1); return softmax(inputs[0]);
    case OpKind::kLogSumExp: arity(1); return log_sum_exp(inputs[0]);
    case OpKind::kMean: arity(1); return mean(inputs[0]);
    case OpKind::kSum: arity(1); return sum(inputs[0]);
    case OpKind::kSquare: arity(1); return square(inputs[0]);
    case OpKind::kMeanPool: arity(1); return mean_pool2(inputs[0]);
    case OpKind::kUnpool: arity(1); return unpool(inputs[0], attrs.shape);
    case OpKind::kReshape: arity(1); return reshape(inputs[0], attrs.shape);
    case OpKind::kIm2Col: arity(1); return im2col(inputs[0], attrs.kernel);
    case OpKind::kCol2Im: arity(1); return col2im(inputs[0], attrs.shape, attrs.kernel);
    case OpKind::kBroadcastScalar:
    case OpKind::kBroadcastRow:
      arity(1);
      return broadcast_to(inputs[0], attrs.shape);
    case OpKind::kSumToRow: arity(1); return sum_to_row(inputs[0], attrs.shape);
    case OpKind::kRowSum: arity(1); return row_sum(inputs[0]);
    case OpKind::kBroadcastCol: arity(1); return broadcast_cols(inputs[0], attrs.shape.at(1));
  }
  fail(ErrorCode::kInvalidArgument, "unknown op kind");
}

// Gradient rules. Every rule is written in terms of the differentiable ops
// above, so running it on recorded inputs yields a recorded gradient.
std::vector<Tensor> node_backward_rule(const Node& node, const std::vector<Tensor>& in,
                                       const Tensor& out, const Tensor& g) {
  auto needs = [&](std::size_t i) { return node.inputs[i].on_graph(); };
  std::vector<Tensor> grads(in.size());
  switch (node.kind) {
    case OpKind::kLeaf:
      break;
    case OpKind::kAdd:
      if (needs(0)) grads[0] = unbroadcast(g, in[0].shape());
      if (needs(1)) grads[1] = unbroadcast(g, in[1].shape());
      break;
    case OpKind::kSub:
      if (needs(0)) grads[0] = unbroadcast(g, in[0].shape());
      if (needs(1)) grads[1] = unbroadcast(scale(g, -1.0), in[1].shape());
      break;
    case OpKind::kMul:
      if (needs(0)) grads[0] = unbroadcast(mul(g, in[1]), in[0].shape());
      if (needs(1)) grads[1] = unbroadcast(mul(g, in[0]), in[1].shape());
      break;
    case OpKind::kMatMul: {
      bool ta = node.attrs.trans_a, tb = node.attrs.trans_b;
      if (needs(0)) {
        grads[0] = ta ? matmul(in[1], g, tb, true) : matmul(g, in[1], false, !tb);
      }
      if (needs(1)) {
        grads[1] = tb ? matmul(g, in[0], true, ta) : matmul(in[0], g, !ta, false);
      }
      break;
    }
    case OpKind::kSigmoid:
      grads[0] = mul(g, sub(out, square(out)));
      break;
    case OpKind::kTanh:
      grads[0] = mul(g, sub(Tensor::scalar(1.0), square(out)));
      break;
    case OpKind::kSquare:
      grads[0] = mul(g, scale(in[0], 2.0));
      break;
    case OpKind::kSoftmax: {
      std::size_t n = out.dim(1);
      grads[0] = mul(out, sub(g, broadcast_cols(row_sum(mul(g, out)), n)));
      break;
    }
    case OpKind::kLogSumExp:
      grads[0] = mul(broadcast_cols(g, in[0].dim(1)), softmax(in[0]));
      break;
    case OpKind::kSum:
      grads[0] = broadcast_to(g, in[0].shape());
      break;
    case OpKind::kMean:
      grads[0] = broadcast_to(scale(g, 1.0 / static_cast<double>(in[0].numel())),
                              in[0].shape());
      break;
    case OpKind::kReshape:
      grads[0] = reshape(g, in[0].shape());
      break;
    case OpKind::kMeanPool:
      grads[0] = unpool(g, in[0].shape());
      break;
    case OpKind::kUnpool:
      grads[0] = mean_pool2(g);
      break;
    case OpKind::kIm2Col:
      grads[0] = col2im(g, in[0].shape(), node.attrs.kernel);
      break;
    case OpKind::kCol2Im:
      grads[0] = im2col(g, node.attrs.kernel);
      break;
    case OpKind::kBroadcastScalar:
      grads[0] = reshape(sum(g), in[0].shape());
      break;
    case OpKind::kBroadcastRow:
      grads[0] = sum_to_row(g, in[0].shape());
      break;
    case OpKind::kSumToRow:
      grads[0] = broadcast_to(g, node.attrs.shape);
      break;
    case OpKind::kRowSum:
      grads[0] = broadcast_cols(g, in[0].dim(1));
      break;
    case OpKind::kBroadcastCol:
      grads[0] = row_sum(g);
      break;
    case OpKind::kRelu:
    case OpKind::kMaxPool:
      fail(ErrorCode::kNonSmoothOpRequested, "non-smooth op on graph");
  }
  return grads;
}

}  // namespace spin::ad
