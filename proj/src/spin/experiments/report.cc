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

#include "spin/experiments/report.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "spin/common/error.h"
#include "spin/fed/metrics.h"

namespace spin::experiments {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back({});
  return out;
}

template <typename T>
bool parse_number(const std::string& s, T& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

MetricsFile read_metrics(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + path.string());
  MetricsFile file;
  file.path = path;
  auto bad = [&](std::size_t line, const std::string& what) {
    fail(ErrorCode::kSchemaMismatch, path.string() + ":" + std::to_string(line) + ": " + what);
  };
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) bad(1, "empty file");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != fed::kMetricsHeader) {
    bad(1, "expected header '" + std::string(fed::kMetricsHeader) + "', got '" + line + "'");
  }
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (cells.size() != 5) bad(lineno, "expected 5 columns, got " + std::to_string(cells.size()));
    fed::RoundRecord r;
    if (!parse_number(cells[0], r.round)) bad(lineno, "round is not an integer: '" + cells[0] + "'");
    if (!parse_number(cells[1], r.accuracy) || r.accuracy < 0.0 || r.accuracy > 1.0) {
      bad(lineno, "global_accuracy is not a number in [0, 1]: '" + cells[1] + "'");
    }
    if (!parse_number(cells[2], r.loss)) bad(lineno, "global_loss is not a number: '" + cells[2] + "'");
    if (cells[3] == "true") {
      r.attacker_present = true;
    } else if (cells[3] != "false") {
      bad(lineno, "attacker_present must be true or false: '" + cells[3] + "'");
    }
    if (file.rows.empty()) {
      file.scenario = cells[4];
    } else {
      if (cells[4] != file.scenario) bad(lineno, "scenario changes from '" + file.scenario + "'");
      if (r.round <= file.rows.back().round) bad(lineno, "rounds must increase");
    }
    file.rows.push_back(r);
  }
  if (file.rows.empty()) bad(lineno, "no data rows");
  return file;
}

Report build_report(const std::vector<fs::path>& files, const std::optional<fs::path>& baseline) {
  if (files.empty() && !baseline) fail(ErrorCode::kInvalidArgument, "no metrics files given");
  std::vector<MetricsFile> parsed;
  for (const auto& f : files) parsed.push_back(read_metrics(f));

  std::optional<std::size_t> base;
  if (baseline) {
    for (std::size_t i = 0; i < parsed.size() && !base; ++i) {
      std::error_code ec;
      if (fs::equivalent(parsed[i].path, *baseline, ec)) base = i;
    }
    if (!base) {
      parsed.insert(parsed.begin(), read_metrics(*baseline));
      base = 0;
    }
  } else if (parsed.size() > 1) {
    for (std::size_t i = 0; i < parsed.size() && !base; ++i) {
      if (parsed[i].scenario == "baseline") base = i;
    }
    if (!base) base = 0;
  }

  Report report;
  if (base) report.baseline = parsed[*base].path.string();
  std::map<int, double> base_curve;
  if (base) {
    for (const auto& r : parsed[*base].rows) base_curve[r.round] = r.accuracy;
  }
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    const MetricsFile& m = parsed[i];
    ReportRow row;
    row.file = m.path.string();
    row.scenario = m.scenario;
    row.rounds = static_cast<int>(m.rows.size());
    row.final_accuracy = m.rows.back().accuracy;
    auto peak = std::max_element(m.rows.begin(), m.rows.end(),
                                 [](const auto& a, const auto& b) { return a.accuracy < b.accuracy; });
    row.peak_accuracy = peak->accuracy;
    row.peak_round = peak->round;
    if (base && i != *base) {
      row.degradation = parsed[*base].rows.back().accuracy - row.final_accuracy;
      for (const auto& r : m.rows) {
        auto it = base_curve.find(r.round);
        if (it == base_curve.end()) continue;
        double d = it->second - r.accuracy;
        if (!row.max_degradation || d > *row.max_degradation) row.max_degradation = d;
        if (!row.onset_round && d > kOnsetThreshold) row.onset_round = r.round;
      }
    }
    report.rows.push_back(row);
  }
  return report;
}

void print_report(const Report& report, std::ostream& out) {
  bool compare = !report.baseline.empty();
  char line[256];
  std::snprintf(line, sizeof line, "%-28s %-16s %6s %8s %8s %5s", "file", "scenario", "rounds", "final",
                "peak", "@");
  out << line;
  if (compare) {
    std::snprintf(line, sizeof line, " %8s %8s %6s", "degr", "maxdegr", "onset");
    out << line;
  }
  out << "\n";
  for (const auto& r : report.rows) {
    std::snprintf(line, sizeof line, "%-28s %-16s %6d %8.4f %8.4f %5d", r.file.c_str(), r.scenario.c_str(),
                  r.rounds, r.final_accuracy, r.peak_accuracy, r.peak_round);
    out << line;
    if (compare) {
      if (r.degradation) {
        std::snprintf(line, sizeof line, " %8.4f %8.4f %6s", *r.degradation, r.max_degradation.value_or(0.0),
                      r.onset_round ? std::to_string(*r.onset_round).c_str() : "-");
      } else {
        std::snprintf(line, sizeof line, " %8s %8s %6s", "(base)", "", "");
      }
      out << line;
    }
    out << "\n";
  }
}

void write_report_csv(const Report& report, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIoError, "cannot write " + path.string());
  bool compare = !report.baseline.empty();
  out << "file,scenario,rounds,final_accuracy,peak_accuracy,peak_round";
  if (compare) out << ",degradation,max_degradation,onset_round";
  out << "\n";
  for (const auto& r : report.rows) {
    out << r.file << "," << r.scenario << "," << r.rounds << "," << fmt(r.final_accuracy) << ","
        << fmt(r.peak_accuracy) << "," << r.peak_round;
    if (compare) {
      out << "," << (r.degradation ? fmt(*r.degradation) : "") << ","
          << (r.max_degradation ? fmt(*r.max_degradation) : "") << ","
          << (r.onset_round ? std::to_string(*r.onset_round) : "");
    }
    out << "\n";
  }
}

}  // namespace spin::experiments
