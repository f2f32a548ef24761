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

#include "spin/experiments/manifest.h"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <memory>
#include <nlohmann/json.hpp>

#include "spin/common/error.h"

#ifndef SPIN_VERSION
#define SPIN_VERSION "0.0.0"
#endif

namespace spin::experiments {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string software_version() { return SPIN_VERSION; }

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    fail(ErrorCode::kIoError, "sha256 unavailable");
  }
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::vector<ManifestEntry> inventory(const fs::path& dir, const fs::path& exclude) {
  std::vector<ManifestEntry> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (!exclude.empty() && fs::equivalent(entry.path(), exclude)) continue;
    out.push_back({entry.path().lexically_relative(dir).generic_string(), entry.file_size(),
                   sha256_file(entry.path())});
  }
  std::sort(out.begin(), out.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
  return out;
}

RunManifest::RunManifest(fs::path output_dir, std::string config_ini, std::string scenario)
    : dir_(std::move(output_dir)),
      path_(dir_ / "manifest.json"),
      config_ini_(std::move(config_ini)),
      scenario_(std::move(scenario)) {}

void RunManifest::begin() {
  started_ = utc_now();
  write("running", {});
}

void RunManifest::finish(bool success, const std::string& error) {
  finished_ = utc_now();
  files_ = inventory(dir_, fs::exists(path_) ? path_ : fs::path());
  write(success ? "complete" : "failed", error);
}

void RunManifest::write(const std::string& status, const std::string& error) const {
  json doc;
  doc["software"] = {{"name", "spin"}, {"version", software_version()}};
  doc["scenario"] = scenario_;
  doc["status"] = status;
  doc["started_at"] = started_;
  if (!finished_.empty()) doc["finished_at"] = finished_;
  if (!error.empty()) doc["error"] = error;
  doc["config"] = config_ini_;
  json files = json::array();
  for (const auto& f : files_) files.push_back({{"path", f.path}, {"bytes", f.bytes}, {"sha256", f.sha256}});
  doc["files"] = files;
  fs::path tmp = path_;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) fail(ErrorCode::kIoError, "cannot write " + tmp.string());
    out << doc.dump(2) << "\n";
  }
  fs::rename(tmp, path_);
}

std::vector<std::string> verify_manifest(const fs::path& manifest) {
  std::ifstream in(manifest);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + manifest.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormatError, manifest.string() + ": " + e.what());
  }
  std::vector<std::string> bad;
  fs::path dir = manifest.parent_path();
  for (const auto& f : doc.at("files")) {
    std::string rel = f.at("path").get<std::string>();
    fs::path p = dir / rel;
    if (!fs::exists(p) || fs::file_size(p) != f.at("bytes").get<std::uintmax_t>() ||
        sha256_file(p) != f.at("sha256").get<std::string>()) {
      bad.push_back(rel);
    }
  }
  return bad;
}

}  // namespace spin::experiments
