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

#include "spin/nn/checkpoint.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "spin/common/error.h"

namespace spin::nn {
namespace {

std::string shape_text(const ad::Shape& shape) {
  std::string out;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += 'x';
    out += std::to_string(shape[i]);
  }
  return out.empty() ? "scalar" : out;
}

std::uint64_t parse_u64(std::string_view text, const std::string& where) {
  if (text.empty()) fail(ErrorCode::kFormatError, where + ": empty number");
  std::uint64_t v = 0;
  for (char c : text) {
    if (c < '0' || c > '9') fail(ErrorCode::kFormatError, where + ": bad number '" + std::string(text) + "'");
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

ad::Shape parse_shape(std::string_view text, const std::string& where) {
  ad::Shape shape;
  if (text == "scalar") return shape;
  std::size_t start = 0;
  while (true) {
    std::size_t x = text.find('x', start);
    shape.push_back(parse_u64(text.substr(start, x - start), where));
    if (x == std::string_view::npos) break;
    start = x + 1;
  }
  return shape;
}

std::string trim(std::string_view s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return {};
  std::size_t b = s.find_last_not_of(" \t\r");
  return std::string(s.substr(a, b - a + 1));
}

void put_le(std::string& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

double get_le(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | p[i];
  return std::bit_cast<double>(bits);
}

void write_pair(std::string_view magic, const ArchitectureSpec& arch, std::uint64_t version,
                const std::vector<NamedTensor>& tensors,
                const std::map<std::string, std::string>& meta,
                const std::filesystem::path& descriptor) {
  std::filesystem::path binary = binary_path_for(descriptor);
  if (descriptor.has_parent_path()) std::filesystem::create_directories(descriptor.parent_path());

  std::ostringstream desc;
  desc << "magic = " << magic << "\n";
  desc << "binary = " << binary.filename().string() << "\n";
  desc << "architecture = " << arch.to_string() << "\n";
  desc << "version = " << version << "\n";
  for (const auto& [k, v] : meta) desc << "meta." << k << " = " << v << "\n";

  std::string bytes(magic);
  for (const auto& t : tensors) {
    desc << "param = " << t.name << " shape=" << shape_text(t.value.shape())
         << " offset=" << bytes.size() << " count=" << t.value.numel() << "\n";
    for (double v : t.value.values()) put_le(bytes, v);
  }

  std::ofstream b(binary, std::ios::binary | std::ios::trunc);
  b.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!b) fail(ErrorCode::kIoError, "cannot write " + binary.string());
  std::ofstream d(descriptor, std::ios::trunc);
  d << desc.str();
  if (!d) fail(ErrorCode::kIoError, "cannot write " + descriptor.string());
}

CheckpointInfo parse_descriptor(const std::filesystem::path& descriptor) {
  std::ifstream in(descriptor);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + descriptor.string());
  CheckpointInfo info;
  bool have_arch = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string where = descriptor.filename().string() + ":" + std::to_string(lineno);
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos) fail(ErrorCode::kFormatError, where + ": expected key = value");
    std::string key = trim(std::string_view(t).substr(0, eq));
    std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key == "magic") {
      info.magic = value;
    } else if (key == "binary") {
      info.binary = descriptor.parent_path() / value;
    } else if (key == "architecture") {
      info.architecture = ArchitectureSpec::parse(value);
      have_arch = true;
    } else if (key == "version") {
      info.version = parse_u64(value, where);
    } else if (key.rfind("meta.", 0) == 0) {
      info.meta[key.substr(5)] = value;
    } else if (key == "param") {
      std::istringstream fields(value);
      CheckpointInfo::Entry e;
      std::string field;
      fields >> e.name;
      bool shape = false, offset = false, count = false;
      while (fields >> field) {
        if (field.rfind("shape=", 0) == 0) {
          e.shape = parse_shape(std::string_view(field).substr(6), where);
          shape = true;
        } else if (field.rfind("offset=", 0) == 0) {
          e.offset = parse_u64(std::string_view(field).substr(7), where);
          offset = true;
        } else if (field.rfind("count=", 0) == 0) {
          e.count = parse_u64(std::string_view(field).substr(6), where);
          count = true;
        } else {
          fail(ErrorCode::kFormatError, where + ": unknown field '" + field + "'");
        }
      }
      if (e.name.empty() || !shape || !offset || !count) {
        fail(ErrorCode::kFormatError, where + ": param needs name, shape, offset and count");
      }
      if (ad::numel(e.shape) != e.count) {
        fail(ErrorCode::kFormatError, where + ": count does not match shape");
      }
      info.entries.push_back(std::move(e));
    } else {
      fail(ErrorCode::kFormatError, where + ": unknown key '" + key + "'");
    }
  }
  if (info.magic != kModelMagic && info.magic != kGradientMagic) {
    fail(ErrorCode::kFormatError, descriptor.string() + ": unknown magic '" + info.magic + "'");
  }
  if (!have_arch) fail(ErrorCode::kFormatError, descriptor.string() + ": missing architecture");
  if (info.binary.empty()) info.binary = binary_path_for(descriptor);

  auto specs = info.architecture.parameter_specs();
  if (specs.size() != info.entries.size()) {
    fail(ErrorCode::kFormatError, descriptor.string() + ": architecture implies " +
                                      std::to_string(specs.size()) + " parameters, descriptor lists " +
                                      std::to_string(info.entries.size()));
  }
  std::uint64_t expected = info.magic.size();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& e = info.entries[i];
    if (e.name != specs[i].name || e.shape != specs[i].shape) {
      fail(ErrorCode::kFormatError, descriptor.string() + ": parameter " + e.name +
                                        " does not match architecture (" + specs[i].name + " " +
                                        shape_text(specs[i].shape) + ")");
    }
    if (e.offset != expected) {
      fail(ErrorCode::kFormatError, descriptor.string() + ": parameter " + e.name +
                                        " at offset " + std::to_string(e.offset) + ", expected " +
                                        std::to_string(expected));
    }
    expected += 8 * e.count;
  }
  return info;
}

std::vector<unsigned char> read_binary(const CheckpointInfo& info) {
  std::ifstream in(info.binary, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + info.binary.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  std::size_t m = info.magic.size();
  if (bytes.size() < m || std::memcmp(bytes.data(), info.magic.data(), m) != 0) {
    fail(ErrorCode::kFormatError, info.binary.string() + ": magic at offset 0 is not " + info.magic);
  }
  std::uint64_t end = m;
  for (const auto& e : info.entries) {
    end = e.offset + 8 * e.count;
    if (bytes.size() < end) {
      std::uint64_t at = bytes.size() < e.offset ? e.offset : e.offset + 8 * ((bytes.size() - e.offset) / 8);
      fail(ErrorCode::kFormatError, info.binary.string() + ": truncated at offset " +
                                        std::to_string(at) + " in parameter " + e.name +
                                        " (file has " + std::to_string(bytes.size()) + " bytes, need " +
                                        std::to_string(end) + ")");
    }
  }
  if (bytes.size() != end) {
    fail(ErrorCode::kFormatError, info.binary.string() + ": trailing bytes after offset " +
                                      std::to_string(end));
  }
  return bytes;
}

std::vector<NamedTensor> materialize(const CheckpointInfo& info,
                                     const std::vector<unsigned char>& bytes) {
  std::vector<NamedTensor> out;
  for (const auto& e : info.entries) {
    std::vector<double> v(e.count);
    for (std::uint64_t i = 0; i < e.count; ++i) {
      v[i] = get_le(bytes.data() + e.offset + 8 * i);
      if (!std::isfinite(v[i])) {
        fail(ErrorCode::kFormatError, info.binary.string() + ": non-finite value at offset " +
                                          std::to_string(e.offset + 8 * i));
      }
    }
    out.push_back({e.name, ad::Tensor::constant(e.shape, std::move(v))});
  }
  return out;
}

}  // namespace

std::filesystem::path binary_path_for(const std::filesystem::path& descriptor) {
  std::filesystem::path p = descriptor;
  p.replace_extension(".bin");
  return p;
}

void save_checkpoint(const ModelState& model, const std::filesystem::path& descriptor,
                     const std::map<std::string, std::string>& meta) {
  write_pair(kModelMagic, model.architecture(), model.version(), model.parameters(), meta,
             descriptor);
}

ModelState load_checkpoint(const std::filesystem::path& descriptor) {
  CheckpointInfo info = parse_descriptor(descriptor);
  if (info.magic != kModelMagic) {
    fail(ErrorCode::kFormatError, descriptor.string() + ": not a model checkpoint (magic " +
                                      info.magic + ")");
  }
  auto tensors = materialize(info, read_binary(info));
  std::vector<ad::Tensor> params;
  for (auto& t : tensors) params.push_back(std::move(t.value));
  return ModelState(info.architecture, std::move(params), info.version);
}

void save_gradient(const GradientVector& gradient, const ArchitectureSpec& architecture,
                   const std::filesystem::path& descriptor,
                   const std::map<std::string, std::string>& meta) {
  auto specs = architecture.parameter_specs();
  if (specs.size() != gradient.entries.size()) {
    fail(ErrorCode::kShapeMismatch, "gradient does not match architecture");
  }
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (specs[i].shape != gradient.entries[i].value.shape()) {
      fail(ErrorCode::kShapeMismatch, "gradient entry " + specs[i].name + " has wrong shape");
    }
  }
  write_pair(kGradientMagic, architecture, 0, gradient.entries, meta, descriptor);
}

LoadedGradient load_gradient(const std::filesystem::path& descriptor) {
  CheckpointInfo info = parse_descriptor(descriptor);
  if (info.magic != kGradientMagic) {
    fail(ErrorCode::kFormatError, descriptor.string() + ": not a gradient file (magic " +
                                      info.magic + ")");
  }
  LoadedGradient out;
  out.architecture = info.architecture;
  out.meta = info.meta;
  out.gradient.entries = materialize(info, read_binary(info));
  return out;
}

CheckpointInfo inspect_checkpoint(const std::filesystem::path& descriptor) {
  CheckpointInfo info = parse_descriptor(descriptor);
  read_binary(info);
  return info;
}

}  // namespace spin::nn
