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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "spin/common/error.h"
#include "spin/data/dataset.h"
#include "spin/data/io.h"
#include "spin/data/transforms.h"
#include "temp_dir.h"

namespace spin::data {
namespace {

using spin::testing::read_file;
using spin::testing::TempDir;
using spin::testing::write_file;

std::string be32(std::uint32_t v) {
  std::string s(4, '\0');
  for (int i = 0; i < 4; ++i) s[i] = static_cast<char>((v >> (24 - 8 * i)) & 0xff);
  return s;
}

// Hand-built 3-image 2x2 IDX pair.
void write_tiny_idx(const TempDir& dir, std::uint32_t image_magic = kIdxImageMagic,
                    std::uint32_t label_magic = kIdxLabelMagic, std::uint32_t label_count = 3,
                    std::size_t drop_bytes = 0) {
  std::string img = be32(image_magic) + be32(3) + be32(2) + be32(2);
  for (int i = 0; i < 12; ++i) img.push_back(static_cast<char>(i * 20));
  img = img.substr(0, img.size() - drop_bytes);
  std::string lab = be32(label_magic) + be32(label_count);
  lab += std::string{'\x07', '\x00', '\x09'};
  write_file(dir / "img", img);
  write_file(dir / "lab", lab);
}

Dataset ramp_dataset(std::size_t n, std::size_t classes = 3) {
  std::vector<Example> ex;
  for (std::size_t i = 0; i < n; ++i) {
    ex.push_back(make_example(i, {static_cast<double>(i) / static_cast<double>(n), 0.0, 0.5, 1.0},
                              static_cast<int>(i % classes), Provenance::kReal));
  }
  return Dataset("ramp", classes, {1, 2, 2}, std::move(ex));
}

TEST(Idx, LoadsHandBuiltFile) {
  TempDir dir;
  write_tiny_idx(dir);
  Dataset ds = load_idx(dir / "img", dir / "lab");
  ASSERT_EQ(ds.size(), 3u);
  EXPECT_EQ(ds.shape(), (ImageShape{1, 2, 2}));
  EXPECT_EQ(ds[0].label, 7);
  EXPECT_EQ(ds[2].label, 9);
  EXPECT_DOUBLE_EQ((*ds[1].pixels)[1], 100.0 / 255.0);
  EXPECT_DOUBLE_EQ((*ds[2].pixels)[3], 220.0 / 255.0);
}

TEST(Idx, LabelMagicOnImageFileIsBadMagic) {
  TempDir dir;
  write_tiny_idx(dir, kIdxLabelMagic);
  try {
    load_idx(dir / "img", dir / "lab");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBadMagic);
  }
}

TEST(Idx, ImageMagicOnLabelFileIsBadMagic) {
  TempDir dir;
  write_tiny_idx(dir, kIdxImageMagic, kIdxImageMagic);
  try {
    load_idx(dir / "img", dir / "lab");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBadMagic);
  }
}

TEST(Idx, CountMismatch) {
  TempDir dir;
  write_tiny_idx(dir, kIdxImageMagic, kIdxLabelMagic, 2);
  try {
    load_idx(dir / "img", dir / "lab");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCountMismatch);
  }
}

TEST(Idx, TruncatedImages) {
  TempDir dir;
  write_tiny_idx(dir, kIdxImageMagic, kIdxLabelMagic, 3, 5);
  try {
    load_idx(dir / "img", dir / "lab");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTruncatedFile);
  }
}

TEST(Idx, WriteThenLoadRoundTrips) {
  TempDir dir;
  write_tiny_idx(dir);
  Dataset a = load_idx(dir / "img", dir / "lab");
  write_idx(a, dir / "img2", dir / "lab2");
  EXPECT_EQ(read_file(dir / "img"), read_file(dir / "img2"));
  EXPECT_EQ(read_file(dir / "lab"), read_file(dir / "lab2"));
}

TEST(Idx, BundledMnistSubsetLoads) {
  std::filesystem::path root = SPIN_TEST_DATA_DIR;
  Dataset ds = load_idx(root / "mnist" / "mnist5k-images-idx3-ubyte",
                        root / "mnist" / "mnist5k-labels-idx1-ubyte");
  EXPECT_EQ(ds.size(), 5000u);
  EXPECT_EQ(ds.shape(), (ImageShape{1, 28, 28}));
  std::vector<int> counts(10, 0);
  for (const auto& e : ds.examples()) ++counts[static_cast<std::size_t>(e.label)];
  for (int c : counts) EXPECT_EQ(c, 500);
}

TEST(Dataset, RejectsOutOfRangePixels) {
  std::vector<Example> ex{make_example(0, {0.0, 1.5, 0.0, 0.0}, 0, Provenance::kReal)};
  EXPECT_THROW(Dataset("bad", 2, {1, 2, 2}, ex), Error);
}

TEST(Dataset, RejectsOutOfRangeLabel) {
  std::vector<Example> ex{make_example(0, {0.0, 0.0, 0.0, 0.0}, 2, Provenance::kReal)};
  EXPECT_THROW(Dataset("bad", 2, {1, 2, 2}, ex), Error);
}

TEST(Dataset, RelabelTagsProvenance) {
  Dataset ds = ramp_dataset(3);
  std::vector<int> labels{2, 2, 0};
  Dataset r = ds.relabeled(labels, Provenance::kPoisoned);
  EXPECT_EQ(r[0].label, 2);
  EXPECT_EQ(r[2].label, 0);
  EXPECT_EQ(r[1].provenance, Provenance::kPoisoned);
  EXPECT_EQ(ds[0].label, 0);
}

TEST(Batch, ChannelsLastLayoutAndUnstack) {
  Dataset ds = ramp_dataset(4);
  std::vector<std::size_t> idx{3, 1};
  Batch b = make_batch(ds, idx);
  EXPECT_EQ(b.inputs.shape(), (ad::Shape{2, 2, 2, 1}));
  EXPECT_EQ(b.labels, (std::vector<int>{0, 1}));
  EXPECT_DOUBLE_EQ(b.inputs.values()[0], 0.75);
  EXPECT_DOUBLE_EQ(b.inputs.values()[4], 0.25);
  auto back = unstack(b, Provenance::kReconstructed);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(*back[0].pixels, *ds[3].pixels);
  EXPECT_EQ(back[1].provenance, Provenance::kReconstructed);
}

TEST(Split, SizesFollowRoundedCumulativeCuts) {
  Dataset ds = ramp_dataset(10);
  std::vector<double> ratios{0.5, 0.25, 0.25};
  auto parts = split(ds, ratios, 3);
  ASSERT_EQ(parts.size(), 3u);
  // round(5) = 5, round(7.5) = 8, 10.
  EXPECT_EQ(parts[0].size(), 5u);
  EXPECT_EQ(parts[1].size(), 3u);
  EXPECT_EQ(parts[2].size(), 2u);
  std::set<std::uint64_t> ids;
  for (const auto& p : parts)
    for (const auto& e : p.examples()) ids.insert(e.id);
  EXPECT_EQ(ids.size(), 10u);
  EXPECT_EQ(parts[0].split(), SplitTag::kTrain);
  EXPECT_EQ(parts[2].split(), SplitTag::kTest);
}

TEST(Split, BadRatios) {
  Dataset ds = ramp_dataset(10);
  std::vector<double> sums_high{0.6, 0.6};
  std::vector<double> negative{1.2, -0.2};
  for (const auto* r : {&sums_high, &negative}) {
    try {
      split(ds, *r, 1);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kBadRatios);
    }
  }
}

TEST(Split, DeterministicPerSeed) {
  Dataset ds = ramp_dataset(40);
  std::vector<double> ratios{0.5, 0.5};
  auto a = split(ds, ratios, 11);
  auto b = split(ds, ratios, 11);
  auto c = split(ds, ratios, 12);
  auto ids = [](const Dataset& d) {
    std::vector<std::uint64_t> v;
    for (const auto& e : d.examples()) v.push_back(e.id);
    return v;
  };
  EXPECT_EQ(ids(a[0]), ids(b[0]));
  EXPECT_NE(ids(a[0]), ids(c[0]));
}

TEST(Partition, DisjointCoveringShards) {
  Dataset ds = ramp_dataset(23);
  auto shards = partition_for_participants(ds, 5, 4);
  ASSERT_EQ(shards.size(), 5u);
  std::vector<std::size_t> sizes;
  std::set<std::uint64_t> ids;
  for (const auto& s : shards) {
    sizes.push_back(s.size());
    for (const auto& e : s.examples()) ids.insert(e.id);
  }
  EXPECT_EQ(sizes, (std::vector<std::size_t>{5, 5, 5, 4, 4}));
  EXPECT_EQ(ids.size(), 23u);
}

TEST(Signs, DeterministicAndInRange) {
  SignSynthConfig cfg;
  cfg.count_per_class = 5;
  Dataset a = synth_signs(cfg);
  Dataset b = synth_signs(cfg);
  ASSERT_EQ(a.size(), 20u);
  EXPECT_EQ(a.classes(), 4u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(*a[i].pixels, *b[i].pixels);
    for (double p : *a[i].pixels) {
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 1.0);
    }
  }
  cfg.seed = 8;
  Dataset c = synth_signs(cfg);
  EXPECT_NE(*a[0].pixels, *c[0].pixels);
}

TEST(Signs, TemplatesAreDistinct) {
  for (std::size_t i = 0; i < kSignClasses; ++i) {
    for (std::size_t j = i + 1; j < kSignClasses; ++j) {
      auto a = sign_template(i, 16), b = sign_template(j, 16);
      double d = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) d += std::abs(a[k] - b[k]);
      EXPECT_GT(d, 10.0) << i << " vs " << j;
    }
  }
}

TEST(Signs, InvalidConfig) {
  SignSynthConfig cfg;
  cfg.image_size = 8;
  EXPECT_THROW(synth_signs(cfg), Error);
  cfg.image_size = 16;
  cfg.noise = 1.5;
  EXPECT_THROW(synth_signs(cfg), Error);
}

TEST(Downsample, PadThenPoolMatchesHandComputation) {
  // A 28x28 image whose pixel (r, c) = c / 27.
  std::vector<double> px(28 * 28);
  for (std::size_t r = 0; r < 28; ++r)
    for (std::size_t c = 0; c < 28; ++c) px[r * 28 + c] = static_cast<double>(c) / 27.0;
  Dataset ds("m", 10, {1, 28, 28}, {make_example(0, px, 3, Provenance::kReal)});
  Dataset small = downsample_mnist(ds);
  ASSERT_EQ(small.shape(), (ImageShape{1, 16, 16}));
  const auto& out = *small[0].pixels;
  // Padded column j maps to source column clamp(j - 2, 0, 27).
  for (std::size_t oc = 0; oc < 16; ++oc) {
    auto src = [](std::size_t j) {
      return static_cast<double>(std::clamp<long>(static_cast<long>(j) - 2, 0, 27)) / 27.0;
    };
    double expect = (src(2 * oc) + src(2 * oc + 1)) / 2.0;
    EXPECT_NEAR(out[5 * 16 + oc], expect, 1e-15) << oc;
  }
  EXPECT_EQ(small[0].label, 3);
}

TEST(Pgm, HeaderAndQuantization) {
  TempDir dir;
  write_pgm(dir / "a.pgm", {0.0, 1.0, 0.5, 0.2}, 2, 2);
  std::string bytes = read_file(dir / "a.pgm");
  std::string header = "P5\n2 2\n255\n";
  ASSERT_EQ(bytes.substr(0, header.size()), header);
  std::string body = bytes.substr(header.size());
  ASSERT_EQ(body.size(), 4u);
  EXPECT_EQ(static_cast<unsigned char>(body[0]), 0);
  EXPECT_EQ(static_cast<unsigned char>(body[1]), 255);
  EXPECT_EQ(static_cast<unsigned char>(body[2]), 128);
  EXPECT_EQ(static_cast<unsigned char>(body[3]), 51);
}

TEST(Pgm, ExportNamesFiles) {
  TempDir dir;
  Dataset ds = ramp_dataset(2).relabeled(std::vector<int>{1, kNoLabel}, Provenance::kReconstructed);
  auto files = export_pgm(ds, dir / "out", 4);
  ASSERT_EQ(files.size(), 2u);
  EXPECT_EQ(files[0].filename(), "reconstructed_4_0_1.pgm");
  EXPECT_EQ(files[1].filename(), "reconstructed_4_1_none.pgm");
  EXPECT_TRUE(std::filesystem::exists(files[1]));
}

}  // namespace
}  // namespace spin::data
