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

#ifndef SPIN_NN_CHECKPOINT_H_
#define SPIN_NN_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "spin/nn/model.h"

namespace spin::nn {

inline constexpr std::string_view kModelMagic = "SPINMDL1";
inline constexpr std::string_view kGradientMagic = "SPINGRD1";

// A checkpoint is a text descriptor plus a sibling binary file (same stem,
// ".bin"). Descriptor lines:
//
//   magic = SPINMDL1
//   binary = <file name of the binary, relative to the descriptor>
//   architecture = <ArchitectureSpec::to_string()>
//   version = <n>
//   meta.<key> = <value>                       (optional, repeated)
//   param = <name> shape=<AxB> offset=<bytes> count=<n>   (in order)
//
// The binary holds the 8-byte magic followed by every parameter as
// little-endian IEEE-754 binary64, in descriptor order.
struct CheckpointInfo {
  std::string magic;
  std::filesystem::path binary;
  ArchitectureSpec architecture;
  std::uint64_t version = 0;
  std::map<std::string, std::string> meta;
  struct Entry {
    std::string name;
    ad::Shape shape;
    std::uint64_t offset = 0;
    std::uint64_t count = 0;
  };
  std::vector<Entry> entries;
};

std::filesystem::path binary_path_for(const std::filesystem::path& descriptor);

void save_checkpoint(const ModelState& model, const std::filesystem::path& descriptor,
                     const std::map<std::string, std::string>& meta = {});
ModelState load_checkpoint(const std::filesystem::path& descriptor);

// Serialized gradient: same layout with magic SPINGRD1. The architecture is
// that of the model the gradient was taken against.
void save_gradient(const GradientVector& gradient, const ArchitectureSpec& architecture,
                   const std::filesystem::path& descriptor,
                   const std::map<std::string, std::string>& meta = {});
struct LoadedGradient {
  ArchitectureSpec architecture;
  GradientVector gradient;
  std::map<std::string, std::string> meta;
};
LoadedGradient load_gradient(const std::filesystem::path& descriptor);

// Parses only the descriptor and validates it against the binary's size
// and magic, without materializing tensors.
CheckpointInfo inspect_checkpoint(const std::filesystem::path& descriptor);

}  // namespace spin::nn

#endif  // SPIN_NN_CHECKPOINT_H_
