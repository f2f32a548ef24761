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

#ifndef SPIN_FED_METRICS_H_
#define SPIN_FED_METRICS_H_

#include <filesystem>
#include <fstream>
#include <string>

#include "spin/fed/federation.h"

namespace spin::fed {

inline constexpr const char* kMetricsHeader =
    "round,global_accuracy,global_loss,attacker_present,scenario";

// Appends one flushed row per round, so an interrupted run leaves a valid
// prefix. Accuracy and loss are printed with 6 decimals.
class MetricsWriter {
 public:
  MetricsWriter(const std::filesystem::path& path, std::string scenario);
  void write(const RoundRecord& record);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::string scenario_;
  std::ofstream out_;
};

std::string format_metrics_row(const RoundRecord& record, const std::string& scenario);

}  // namespace spin::fed

#endif  // SPIN_FED_METRICS_H_
