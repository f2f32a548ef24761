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

#include "spin/fed/metrics.h"

#include <cstdio>

#include "spin/common/error.h"

namespace spin::fed {

std::string format_metrics_row(const RoundRecord& record, const std::string& scenario) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f,%s,", record.round, record.accuracy, record.loss,
                record.attacker_present ? "true" : "false");
  return buf + scenario;
}

MetricsWriter::MetricsWriter(const std::filesystem::path& path, std::string scenario)
    : path_(path), scenario_(std::move(scenario)) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::trunc);
  if (!out_) fail(ErrorCode::kIoError, "cannot write " + path.string());
  out_ << kMetricsHeader << "\n";
  out_.flush();
}

void MetricsWriter::write(const RoundRecord& record) {
  out_ << format_metrics_row(record, scenario_) << "\n";
  out_.flush();
  if (!out_) fail(ErrorCode::kIoError, "cannot write " + path_.string());
}

}  // namespace spin::fed
