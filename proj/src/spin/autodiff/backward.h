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

#ifndef SPIN_AUTODIFF_BACKWARD_H_
#define SPIN_AUTODIFF_BACKWARD_H_

#include <span>
#include <vector>

#include "spin/autodiff/tensor.h"

namespace spin::ad {

// Reverse-mode sweep from a one-element root. Returns d root / d wrt[i] for
// every requested tensor (zeros when wrt[i] does not influence root). With
// create_graph set the returned tensors are themselves recorded, so they can
// be fed into another backward() call.
std::vector<Tensor> backward(const Tensor& root, std::span<const Tensor> wrt,
                             bool create_graph = false);

// Gradient rule for one node; exposed for tests.
std::vector<Tensor> node_backward(const Node& node, const Tensor& grad,
                                  bool create_graph);

}  // namespace spin::ad

#endif  // SPIN_AUTODIFF_BACKWARD_H_
