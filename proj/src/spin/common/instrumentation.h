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

#ifndef SPIN_COMMON_INSTRUMENTATION_H_
#define SPIN_COMMON_INSTRUMENTATION_H_

#include <atomic>
#include <cstdint>

namespace spin {

// Call counters threaded through a run by pointer. Tests use them to check
// which code paths a scenario exercised.
struct Instrumentation {
  std::atomic<std::uint64_t> benign_local_train{0};
  std::atomic<std::uint64_t> attacker_local_train{0};
  std::atomic<std::uint64_t> aggregations{0};
  std::atomic<std::uint64_t> intercepts{0};
  std::atomic<std::uint64_t> inversions{0};
  std::atomic<std::uint64_t> gan_steps{0};
  std::atomic<std::uint64_t> poisoned_models{0};
};

inline void bump(std::atomic<std::uint64_t> Instrumentation::*field, Instrumentation* counters,
                 std::uint64_t by = 1) {
  if (counters) (counters->*field) += by;
}

}  // namespace spin

#endif  // SPIN_COMMON_INSTRUMENTATION_H_
