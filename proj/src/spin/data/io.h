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

#ifndef SPIN_DATA_IO_H_
#define SPIN_DATA_IO_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spin/data/dataset.h"

namespace spin::data {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

// Big-endian IDX pair (image file: magic, count, rows, cols, bytes; label
// file: magic, count, bytes). Bytes are scaled to [0, 1] by /255.
// Errors: BadMagic, CountMismatch, TruncatedFile, IoError.
Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                 std::size_t classes = 10, std::string name = "mnist");

// Writes the dataset back as an IDX pair; pixels are quantized with
// round(clamp(p) * 255).
void write_idx(const Dataset& dataset, const std::filesystem::path& images,
               const std::filesystem::path& labels);

std::uint8_t to_byte(double pixel);

// Binary PGM (P5, maxval 255) of one channels-last grayscale image.
void write_pgm(const std::filesystem::path& path, const std::vector<double>& pixels,
               std::size_t height, std::size_t width);

// One PGM per example named <provenance>_<round>_<index>_<label>.pgm;
// unlabeled examples use "none" for the label field.
std::vector<std::filesystem::path> export_pgm(const Dataset& dataset,
                                              const std::filesystem::path& dir,
                                              int round);

std::string pgm_filename(Provenance provenance, int round, std::size_t index, int label);

}  // namespace spin::data

#endif  // SPIN_DATA_IO_H_
