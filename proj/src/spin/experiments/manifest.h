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

#ifndef SPIN_EXPERIMENTS_MANIFEST_H_
#define SPIN_EXPERIMENTS_MANIFEST_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace spin::experiments {

std::string software_version();

// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

struct ManifestEntry {
  std::string path;  // relative to the output directory, '/' separated
  std::uintmax_t bytes = 0;
  std::string sha256;
};

// manifest.json in an output directory. begin() writes it with status
// "running"; finish() adds the end time and a digest of every other file
// under the directory.
class RunManifest {
 public:
  RunManifest(std::filesystem::path output_dir, std::string config_ini, std::string scenario);
  void begin();
  void finish(bool success, const std::string& error = {});
  const std::filesystem::path& path() const { return path_; }

 private:
  void write(const std::string& status, const std::string& error) const;

  std::filesystem::path dir_;
  std::filesystem::path path_;
  std::string config_ini_;
  std::string scenario_;
  std::string started_;
  std::string finished_;
  std::vector<ManifestEntry> files_;
};

std::vector<ManifestEntry> inventory(const std::filesystem::path& dir,
                                     const std::filesystem::path& exclude);

// Recomputes every digest listed in a manifest; returns the paths that are
// missing or differ.
std::vector<std::string> verify_manifest(const std::filesystem::path& manifest);

}  // namespace spin::experiments

#endif  // SPIN_EXPERIMENTS_MANIFEST_H_
