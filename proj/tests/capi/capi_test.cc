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

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "spin/spin.h"
#include "../unit/temp_dir.h"

namespace {

using spin::testing::read_file;
using spin::testing::TempDir;
using spin::testing::write_file;

const std::string kData = SPIN_TEST_DATA_DIR;
const std::string kImages = kData + "/mnist/mnist5k-images-idx3-ubyte";
const std::string kLabels = kData + "/mnist/mnist5k-labels-idx1-ubyte";

TEST(CApi, VersionAndStatusNames) {
  EXPECT_EQ(spin_api_version(), SPIN_API_VERSION);
  EXPECT_STRNE(spin_version(), "");
  EXPECT_STREQ(spin_status_name(SPIN_OK), "Ok");
  EXPECT_STREQ(spin_status_name(SPIN_E_BAD_MAGIC), "BadMagic");
  EXPECT_STREQ(spin_status_name(SPIN_E_INVALID_ARGUMENT), "InvalidArgument");
  EXPECT_STREQ(spin_status_name(static_cast<spin_status>(77)), "Unknown");
}

TEST(CApi, ErrorsSetTheThreadLocalMessage) {
  spin_model* m = nullptr;
  EXPECT_EQ(spin_model_load("/nonexistent/x.ckpt", &m), SPIN_E_IO);
  EXPECT_EQ(m, nullptr);
  EXPECT_NE(std::string(spin_last_error()).find("x.ckpt"), std::string::npos) << spin_last_error();
  EXPECT_EQ(spin_model_init("resnet", 1, 4, 4, 3, 1, &m), SPIN_E_INVALID_CONFIG);
  EXPECT_EQ(spin_model_init("mlp-s", 1, 4, 4, 3, 1, nullptr), SPIN_E_INVALID_ARGUMENT);
  ASSERT_EQ(spin_model_init("mlp-s", 1, 4, 4, 3, 1, &m), SPIN_OK);
  EXPECT_STREQ(spin_last_error(), "");
  spin_model_free(m);

  TempDir dir;
  write_file(dir / "bad-images", std::string("\x00\x00\x08\x01\x00\x00\x00\x00", 8));
  spin_dataset* d = nullptr;
  EXPECT_EQ(spin_dataset_load_idx((dir / "bad-images").c_str(), kLabels.c_str(), 0, &d), SPIN_E_BAD_MAGIC);
}

TEST(CApi, ModelRoundTripIsBitExact) {
  TempDir dir;
  spin_model* m = nullptr;
  ASSERT_EQ(spin_model_init("conv-s", 1, 16, 16, 10, 9, &m), SPIN_OK);
  std::size_t n = spin_model_parameter_count(m);
  EXPECT_EQ(n, 8u * 9 + 8 + 8 * 7 * 7 * 10 + 10);
  std::string path = (dir / "m.ckpt").string();
  ASSERT_EQ(spin_model_save(m, path.c_str()), SPIN_OK);
  spin_model* back = nullptr;
  ASSERT_EQ(spin_model_load(path.c_str(), &back), SPIN_OK);
  std::vector<double> a(n), b(n);
  ASSERT_EQ(spin_model_parameters(m, a.data(), n), SPIN_OK);
  ASSERT_EQ(spin_model_parameters(back, b.data(), n), SPIN_OK);
  EXPECT_EQ(0, std::memcmp(a.data(), b.data(), n * sizeof(double)));

  std::size_t needed = 0;
  ASSERT_EQ(spin_inspect_checkpoint(path.c_str(), nullptr, 0, &needed), SPIN_OK);
  std::string text(needed, '\0');
  ASSERT_EQ(spin_inspect_checkpoint(path.c_str(), text.data(), text.size(), &needed), SPIN_OK);
  EXPECT_NE(text.find("magic: SPINMDL1"), std::string::npos);
  EXPECT_NE(text.find("parameters: " + std::to_string(n)), std::string::npos) << text;
  char tiny[8];
  ASSERT_EQ(spin_inspect_checkpoint(path.c_str(), tiny, sizeof tiny, &needed), SPIN_OK);
  EXPECT_EQ(std::string(tiny), "magic: ");
  spin_model_free(m);
  spin_model_free(back);
}

TEST(CApi, CaptureSaveLoadAndInvert) {
  TempDir dir;
  spin_dataset* d = nullptr;
  ASSERT_EQ(spin_dataset_load_idx(kImages.c_str(), kLabels.c_str(), 1, &d), SPIN_OK);
  EXPECT_EQ(spin_dataset_size(d), 5000u);
  EXPECT_EQ(spin_dataset_pixels_per_example(d), 256u);
  spin_model* m = nullptr;
  ASSERT_EQ(spin_model_init("mlp-s", 1, 16, 16, 10, 3, &m), SPIN_OK);
  std::size_t idx[] = {42};
  spin_gradient* g = nullptr;
  ASSERT_EQ(spin_capture_gradient(m, d, idx, 1, &g), SPIN_OK);
  std::string gpath = (dir / "g.desc").string();
  ASSERT_EQ(spin_gradient_save(g, m, gpath.c_str()), SPIN_OK);
  spin_gradient* loaded = nullptr;
  ASSERT_EQ(spin_gradient_load(gpath.c_str(), &loaded), SPIN_OK);
  EXPECT_EQ(spin_gradient_batch_size(loaded), 1u);

  spin_invert_options o;
  spin_invert_options_default(&o);
  o.restarts = 2;
  spin_invert_result r{};
  spin_dataset* rec = nullptr;
  std::string out = (dir / "new" / "inv").string();
  ASSERT_EQ(spin_invert(m, loaded, &o, out.c_str(), &r, &rec), SPIN_OK) << spin_last_error();
  std::vector<double> truth(256), got(256);
  int label = -1, rec_label = -1;
  ASSERT_EQ(spin_dataset_example(d, 42, truth.data(), &label), SPIN_OK);
  ASSERT_EQ(spin_dataset_example(rec, 0, got.data(), &rec_label), SPIN_OK);
  EXPECT_EQ(r.labels[0], label);
  EXPECT_EQ(rec_label, label);
  double mse = 0;
  for (std::size_t i = 0; i < 256; ++i) mse += (truth[i] - got[i]) * (truth[i] - got[i]) / 256.0;
  EXPECT_LT(mse, 1e-2);
  EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(out) / "trace.csv"));
  EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(out) / ("reconstructed_0_0_" + std::to_string(label) + ".pgm")));

  // Wrong architecture for the gradient.
  spin_model* other = nullptr;
  ASSERT_EQ(spin_model_init("conv-s", 1, 16, 16, 10, 3, &other), SPIN_OK);
  EXPECT_EQ(spin_invert(other, loaded, &o, nullptr, nullptr, nullptr), SPIN_E_SHAPE_MISMATCH);
  EXPECT_EQ(spin_gradient_save(g, other, gpath.c_str()), SPIN_E_SHAPE_MISMATCH);

  // Truncated gradient binary.
  std::string bin = read_file(dir / "g.bin");
  write_file(dir / "g.bin", bin.substr(0, 100));
  spin_gradient* broken = nullptr;
  EXPECT_EQ(spin_gradient_load(gpath.c_str(), &broken), SPIN_E_FORMAT);
  EXPECT_NE(std::string(spin_last_error()).find("offset"), std::string::npos);

  std::size_t bad_idx[] = {5000};
  EXPECT_EQ(spin_capture_gradient(m, d, bad_idx, 1, &broken), SPIN_E_INVALID_ARGUMENT);

  spin_dataset_free(rec);
  spin_gradient_free(g);
  spin_gradient_free(loaded);
  spin_model_free(other);
  spin_model_free(m);
  spin_dataset_free(d);
}

TEST(CApi, SynthWriteAndExport) {
  TempDir dir;
  spin_dataset* s = nullptr;
  ASSERT_EQ(spin_synth_signs(2, 12, 0.1, 5, &s), SPIN_OK);
  EXPECT_EQ(spin_dataset_size(s), 8u);
  EXPECT_EQ(spin_dataset_classes(s), 4u);
  std::string img = (dir / "i").string(), lab = (dir / "l").string();
  ASSERT_EQ(spin_dataset_write_idx(s, img.c_str(), lab.c_str()), SPIN_OK);
  spin_dataset* back = nullptr;
  ASSERT_EQ(spin_dataset_load_idx(img.c_str(), lab.c_str(), 0, &back), SPIN_OK);
  EXPECT_EQ(spin_dataset_size(back), 8u);
  std::size_t pick[] = {3, 1};
  spin_dataset* sub = nullptr;
  ASSERT_EQ(spin_dataset_subset(s, pick, 2, &sub), SPIN_OK);
  std::size_t written = 0;
  ASSERT_EQ(spin_dataset_export_pgm(sub, (dir / "pgm").c_str(), 0, &written), SPIN_OK);
  EXPECT_EQ(written, 2u);
  EXPECT_EQ(spin_synth_signs(2, 8, 0.1, 5, &s), SPIN_E_INVALID_CONFIG);
  spin_dataset_free(sub);
  spin_dataset_free(back);
  spin_dataset_free(s);
}

TEST(CApi, RunScenarioAndReport) {
  TempDir dir;
  write_file(dir / "s.ini", R"([scenario]
name = capi
dataset = signs
rounds = 2
output_dir = out
[data]
train_ratio = 0.5
val_ratio = 0.25
test_ratio = 0.25
signs_per_class = 6
signs_size = 12
[model]
architecture = mlp-s
[participants]
benign = 2
benign_epochs = 1
)");
  std::string cfg = (dir / "s.ini").string();
  std::string root = dir.path().string();
  const char* sets[] = {"scenario.rounds=3"};
  spin_run_options o{};
  o.config_path = cfg.c_str();
  o.overrides = sets;
  o.override_count = 1;
  o.output_root = root.c_str();
  spin_run_result r{};
  ASSERT_EQ(spin_run_scenario(&o, &r), SPIN_OK) << spin_last_error();
  EXPECT_EQ(r.rounds, 3);
  EXPECT_EQ(std::string(r.output_dir), (dir / "out").string());

  const char* bad[] = {"scenario.rounds"};
  o.overrides = bad;
  EXPECT_EQ(spin_run_scenario(&o, &r), SPIN_E_INVALID_CONFIG);

  std::string metrics = (dir / "out" / "metrics.csv").string();
  const char* files[] = {metrics.c_str(), metrics.c_str()};
  std::string csv = (dir / "summary.csv").string();
  ASSERT_EQ(spin_report(files, 2, nullptr, csv.c_str(), 0), SPIN_OK);
  EXPECT_NE(read_file(csv).find(",0.000000,0.000000,"), std::string::npos) << read_file(csv);
  write_file(dir / "junk.csv", "a,b\n");
  std::string junk = (dir / "junk.csv").string();
  const char* junk_files[] = {junk.c_str()};
  EXPECT_EQ(spin_report(junk_files, 1, nullptr, nullptr, 0), SPIN_E_SCHEMA_MISMATCH);
}

}  // namespace
