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

#ifndef SPIN_EXPERIMENTS_REPORT_H_
#define SPIN_EXPERIMENTS_REPORT_H_

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "spin/fed/federation.h"

namespace spin::experiments {

struct MetricsFile {
  std::filesystem::path path;
  std::string scenario;
  std::vector<fed::RoundRecord> rows;
};

// Parses a metrics CSV; any header or row deviation raises SchemaMismatch
// naming the file and line.
MetricsFile read_metrics(const std::filesystem::path& path);

inline constexpr double kOnsetThreshold = 0.02;

struct ReportRow {
  std::string file;  // path as given
  std::string scenario;
  int rounds = 0;
  double final_accuracy = 0.0;
  double peak_accuracy = 0.0;
  int peak_round = 0;
  // Present only when a baseline other than this file exists.
  std::optional<double> degradation;      // baseline final - this final
  std::optional<double> max_degradation;  // over rounds both files share
  std::optional<int> onset_round;         // first round degraded by > 2 points
};

struct Report {
  std::string baseline;  // path of the baseline, empty for one file
  std::vector<ReportRow> rows;
};

// The baseline is `baseline` if given (it is added when not among `files`),
// else the first file whose scenario column reads "baseline", else the
// first file.
Report build_report(const std::vector<std::filesystem::path>& files,
                    const std::optional<std::filesystem::path>& baseline = std::nullopt);

void print_report(const Report& report, std::ostream& out);
// Header: file,scenario,rounds,final_accuracy,peak_accuracy,peak_round
// followed by degradation,max_degradation,onset_round when a baseline
// comparison exists.
void write_report_csv(const Report& report, const std::filesystem::path& path);

}  // namespace spin::experiments

#endif  // SPIN_EXPERIMENTS_REPORT_H_
