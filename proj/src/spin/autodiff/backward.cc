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

#include "spin/autodiff/backward.h"

#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "spin/autodiff/ops.h"
#include "spin/common/error.h"

namespace spin::ad {

std::vector<Tensor> node_backward_rule(const Node& node, const std::vector<Tensor>& in,
                                       const Tensor& out, const Tensor& g);

std::vector<Tensor> node_backward(const Node& node, const Tensor& grad,
                                  bool create_graph) {
  std::vector<Tensor> inputs;
  inputs.reserve(node.inputs.size());
  Tensor out;
  if (create_graph) {
    inputs = node.inputs;
    // const_cast is confined to re-wrapping the node's own output; the node
    // itself is never modified.
    out = TensorAccess::make(node.output,
                             const_cast<Node&>(node).shared_from_this());
  } else {
    for (const Tensor& t : node.inputs) inputs.push_back(t.detach());
    out = TensorAccess::make(node.output, nullptr);
  }
  return node_backward_rule(node, inputs, out, create_graph ? grad : grad.detach());
}

namespace {

// Post-order DFS; the result lists every node after all of its inputs.
std::vector<Node*> topo_order(Node* root) {
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(root, 0);
  visited.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node* child = TensorAccess::node(node->inputs[next]).get();
      ++next;
      if (child && visited.insert(child).second) stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  return order;
}

}  // namespace

std::vector<Tensor> backward(const Tensor& root, std::span<const Tensor> wrt,
                             bool create_graph) {
  if (!root.defined() || root.numel() != 1) {
    fail(ErrorCode::kNotScalarRoot,
         "backward root must hold one value, got shape " + shape_str(root.shape()));
  }
  for (std::size_t i = 0; i < wrt.size(); ++i) {
    if (!wrt[i].on_graph()) {
      fail(ErrorCode::kDetachedTensor,
           "wrt[" + std::to_string(i) + "] is not recorded on a graph");
    }
  }
  std::vector<Tensor> result(wrt.size());
  if (!root.on_graph()) {
    for (std::size_t i = 0; i < wrt.size(); ++i) result[i] = Tensor::zeros(wrt[i].shape());
    return result;
  }

  Node* root_node = TensorAccess::node(root).get();
  std::vector<Node*> order = topo_order(root_node);

  std::unordered_set<const Node*> wanted;
  for (const Tensor& t : wrt) wanted.insert(t.node());

  std::unordered_map<const Node*, Tensor> grads;
  grads.emplace(root_node, Tensor::full(root.shape(), 1.0));

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    auto found = grads.find(node);
    if (found == grads.end() || node->kind == OpKind::kLeaf) continue;
    Tensor g = found->second;
    std::vector<Tensor> input_grads = node_backward(*node, g, create_graph);
    for (std::size_t i = 0; i < node->inputs.size(); ++i) {
      const Node* child = TensorAccess::node(node->inputs[i]).get();
      if (!child || !input_grads[i].defined()) continue;
      auto [slot, inserted] = grads.try_emplace(child, input_grads[i]);
      if (!inserted) slot->second = add(slot->second, input_grads[i]);
    }
    // Interior gradients are no longer needed once propagated.
    if (!wanted.contains(node)) grads.erase(node);
  }

  for (std::size_t i = 0; i < wrt.size(); ++i) {
    auto found = grads.find(wrt[i].node());
    result[i] = found == grads.end() ? Tensor::zeros(wrt[i].shape()) : found->second;
  }
  return result;
}

}  // namespace spin::ad
