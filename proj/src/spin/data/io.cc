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

#include "spin/data/io.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>

#include "spin/common/error.h"

namespace spin::data {
namespace fs = std::filesystem;

namespace {

std::vector<unsigned char> read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<unsigned char>& bytes, std::size_t offset,
                        const fs::path& path) {
  if (bytes.size() < offset + 4) {
    fail(ErrorCode::kTruncatedFile,
         path.string() + ": header ends at byte " + std::to_string(bytes.size()));
  }
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void put_be32(std::ofstream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                     static_cast<char>(v >> 8), static_cast<char>(v)};
  out.write(b, 4);
}

std::string hex(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08X", v);
  return buf;
}

}  // namespace

Dataset load_idx(const fs::path& images, const fs::path& labels, std::size_t classes,
                 std::string name) {
  auto img = read_all(images);
  auto lab = read_all(labels);

  std::uint32_t img_magic = read_be32(img, 0, images);
  if (img_magic != kIdxImageMagic) {
    fail(ErrorCode::kBadMagic, images.string() + ": image magic " + hex(img_magic) +
                                   ", expected " + hex(kIdxImageMagic));
  }
  std::uint32_t lab_magic = read_be32(lab, 0, labels);
  if (lab_magic != kIdxLabelMagic) {
    fail(ErrorCode::kBadMagic, labels.string() + ": label magic " + hex(lab_magic) +
                                   ", expected " + hex(kIdxLabelMagic));
  }
  std::size_t count = read_be32(img, 4, images);
  std::size_t rows = read_be32(img, 8, images);
  std::size_t cols = read_be32(img, 12, images);
  std::size_t label_count = read_be32(lab, 4, labels);
  if (count != label_count) {
    fail(ErrorCode::kCountMismatch, std::to_string(count) + " images but " +
                                        std::to_string(label_count) + " labels");
  }
  std::size_t pixels = rows * cols;
  if (img.size() < 16 + count * pixels) {
    fail(ErrorCode::kTruncatedFile, images.string() + ": expected " +
                                        std::to_string(16 + count * pixels) + " bytes, found " +
                                        std::to_string(img.size()));
  }
  if (lab.size() < 8 + count) {
    fail(ErrorCode::kTruncatedFile, labels.string() + ": expected " +
                                        std::to_string(8 + count) + " bytes, found " +
                                        std::to_string(lab.size()));
  }

  std::vector<Example> examples;
  examples.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<double> px(pixels);
    const unsigned char* src = img.data() + 16 + i * pixels;
    for (std::size_t p = 0; p < pixels; ++p) px[p] = src[p] / 255.0;
    int label = lab[8 + i];
    if (static_cast<std::size_t>(label) >= classes) {
      fail(ErrorCode::kFormatError, labels.string() + ": label " + std::to_string(label) +
                                        " at index " + std::to_string(i) + " >= " +
                                        std::to_string(classes) + " classes");
    }
    examples.push_back(make_example(i, std::move(px), label, Provenance::kReal));
  }
  return Dataset(std::move(name), classes, {1, rows, cols}, std::move(examples), SplitTag::kAll,
                 images.string());
}

std::uint8_t to_byte(double pixel) {
  double clamped = std::clamp(pixel, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::lround(clamped * 255.0));
}

void write_idx(const Dataset& dataset, const fs::path& images, const fs::path& labels) {
  if (dataset.shape().channels != 1) {
    fail(ErrorCode::kInvalidArgument, "IDX export supports single-channel images only");
  }
  std::ofstream img(images, std::ios::binary);
  std::ofstream lab(labels, std::ios::binary);
  if (!img || !lab) fail(ErrorCode::kIoError, "cannot create IDX files in " + images.parent_path().string());
  put_be32(img, kIdxImageMagic);
  put_be32(img, static_cast<std::uint32_t>(dataset.size()));
  put_be32(img, static_cast<std::uint32_t>(dataset.shape().height));
  put_be32(img, static_cast<std::uint32_t>(dataset.shape().width));
  put_be32(lab, kIdxLabelMagic);
  put_be32(lab, static_cast<std::uint32_t>(dataset.size()));
  for (const Example& e : dataset.examples()) {
    for (double p : *e.pixels) img.put(static_cast<char>(to_byte(p)));
    lab.put(static_cast<char>(e.label < 0 ? 0 : e.label));
  }
  if (!img || !lab) fail(ErrorCode::kIoError, "write failed for " + images.string());
}

void write_pgm(const fs::path& path, const std::vector<double>& pixels, std::size_t height,
               std::size_t width) {
  if (pixels.size() != height * width) {
    fail(ErrorCode::kShapeMismatch, "PGM export expects a single-channel image");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIoError, "cannot create " + path.string());
  out << "P5\n" << width << ' ' << height << "\n255\n";
  for (double p : pixels) out.put(static_cast<char>(to_byte(p)));
  if (!out) fail(ErrorCode::kIoError, "write failed for " + path.string());
}

std::string pgm_filename(Provenance provenance, int round, std::size_t index, int label) {
  return std::string(provenance_name(provenance)) + "_" + std::to_string(round) + "_" +
         std::to_string(index) + "_" + (label == kNoLabel ? "none" : std::to_string(label)) +
         ".pgm";
}

std::vector<fs::path> export_pgm(const Dataset& dataset, const fs::path& dir, int round) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIoError, "cannot create " + dir.string() + ": " + ec.message());
  std::vector<fs::path> written;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const Example& e = dataset[i];
    fs::path p = dir / pgm_filename(e.provenance, round, i, e.label);
    write_pgm(p, *e.pixels, dataset.shape().height, dataset.shape().width);
    written.push_back(p);
  }
  return written;
}

}  // namespace spin::data
