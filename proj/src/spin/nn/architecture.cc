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

#include "spin/nn/architecture.h"

#include <sstream>

#include "spin/common/error.h"

namespace spin::nn {
namespace {

struct Activation {
  bool image = true;
  std::size_t h = 0, w = 0, c = 0;  // image form
  std::size_t flat = 0;             // flat form

  std::size_t width() const { return image ? h * w * c : flat; }
};

std::vector<std::string> split_on(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  return parts;
}

std::size_t parse_size(const std::string& s, std::string_view what) {
  try {
    std::size_t pos = 0;
    unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    fail(ErrorCode::kFormatError, "bad " + std::string(what) + " '" + s + "'");
  }
}

}  // namespace

ArchitectureSpec ArchitectureSpec::mlp_s(data::ImageShape input, std::size_t classes,
                                         std::size_t hidden) {
  return {input,
          {{LayerKind::kAffine, hidden, 0}, {LayerKind::kSigmoid, 0, 0},
           {LayerKind::kAffine, classes, 0}},
          classes};
}

ArchitectureSpec ArchitectureSpec::conv_s(data::ImageShape input, std::size_t classes,
                                          std::size_t filters, std::size_t kernel) {
  return {input,
          {{LayerKind::kConv, filters, kernel}, {LayerKind::kSigmoid, 0, 0},
           {LayerKind::kMeanPool, 0, 0}, {LayerKind::kAffine, classes, 0}},
          classes};
}

ArchitectureSpec ArchitectureSpec::reference(std::string_view name, data::ImageShape input,
                                             std::size_t classes) {
  if (name == "mlp-s") return mlp_s(input, classes);
  if (name == "conv-s") return conv_s(input, classes);
  fail(ErrorCode::kInvalidConfig, "unknown architecture '" + std::string(name) +
                                      "' (expected mlp-s or conv-s)");
}

void ArchitectureSpec::validate() const {
  if (classes < 1) fail(ErrorCode::kShapeMismatch, "architecture needs at least one class");
  if (input.size() == 0) fail(ErrorCode::kShapeMismatch, "architecture input is empty");
  if (layers.empty() || layers.back().kind != LayerKind::kAffine ||
      layers.back().width != classes) {
    fail(ErrorCode::kShapeMismatch, "final layer must be affine with " +
                                        std::to_string(classes) + " outputs");
  }
  Activation act{true, input.height, input.width, input.channels, 0};
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerSpec& l = layers[i];
    std::string where = "layer " + std::to_string(i);
    switch (l.kind) {
      case LayerKind::kRelu:
        fail(ErrorCode::kNonSmoothOpRequested,
             where + ": relu is not twice differentiable; use sigmoid");
      case LayerKind::kSigmoid:
      case LayerKind::kTanh:
        break;
      case LayerKind::kAffine:
        if (l.width == 0) fail(ErrorCode::kShapeMismatch, where + ": affine width is 0");
        act = {false, 0, 0, 0, l.width};
        break;
      case LayerKind::kConv:
        if (!act.image) fail(ErrorCode::kShapeMismatch, where + ": conv after flatten");
        if (l.width == 0 || l.kernel == 0 || l.kernel > act.h || l.kernel > act.w) {
          fail(ErrorCode::kShapeMismatch, where + ": conv kernel does not fit input");
        }
        act = {true, act.h - l.kernel + 1, act.w - l.kernel + 1, l.width, 0};
        break;
      case LayerKind::kMeanPool:
        if (!act.image || act.h < 2 || act.w < 2) {
          fail(ErrorCode::kShapeMismatch, where + ": mean-pool needs an image of at least 2x2");
        }
        act = {true, act.h / 2, act.w / 2, act.c, 0};
        break;
    }
  }
}

std::vector<ParamSpec> ArchitectureSpec::parameter_specs() const {
  validate();
  std::vector<ParamSpec> specs;
  Activation act{true, input.height, input.width, input.channels, 0};
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerSpec& l = layers[i];
    std::string prefix = "layer" + std::to_string(i);
    if (l.kind == LayerKind::kAffine) {
      std::size_t in = act.width();
      specs.push_back({prefix + ".weight", {in, l.width}, in, l.width, false});
      specs.push_back({prefix + ".bias", {l.width}, in, l.width, true});
      act = {false, 0, 0, 0, l.width};
    } else if (l.kind == LayerKind::kConv) {
      std::size_t patch = l.kernel * l.kernel * act.c;
      specs.push_back({prefix + ".weight", {patch, l.width}, patch,
                       l.kernel * l.kernel * l.width, false});
      specs.push_back({prefix + ".bias", {l.width}, patch, l.width, true});
      act = {true, act.h - l.kernel + 1, act.w - l.kernel + 1, l.width, 0};
    } else if (l.kind == LayerKind::kMeanPool) {
      act = {true, act.h / 2, act.w / 2, act.c, 0};
    }
  }
  return specs;
}

std::size_t ArchitectureSpec::parameter_count() const {
  std::size_t n = 0;
  for (const ParamSpec& p : parameter_specs()) n += ad::numel(p.shape);
  return n;
}

std::size_t ArchitectureSpec::feature_width() const {
  auto specs = parameter_specs();
  return specs[specs.size() - 2].shape[0];
}

std::string ArchitectureSpec::to_string() const {
  std::ostringstream os;
  os << "input=" << input.channels << 'x' << input.height << 'x' << input.width
     << " classes=" << classes << " layers=";
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (i) os << ',';
    const LayerSpec& l = layers[i];
    switch (l.kind) {
      case LayerKind::kAffine: os << "affine:" << l.width; break;
      case LayerKind::kConv: os << "conv:" << l.width << 'x' << l.kernel; break;
      case LayerKind::kMeanPool: os << "meanpool"; break;
      case LayerKind::kSigmoid: os << "sigmoid"; break;
      case LayerKind::kTanh: os << "tanh"; break;
      case LayerKind::kRelu: os << "relu"; break;
    }
  }
  return os.str();
}

ArchitectureSpec ArchitectureSpec::parse(std::string_view text) {
  ArchitectureSpec spec;
  bool have_input = false, have_classes = false, have_layers = false;
  for (const std::string& field : split_on(text, ' ')) {
    if (field.empty()) continue;
    auto eq = field.find('=');
    if (eq == std::string::npos) fail(ErrorCode::kFormatError, "bad architecture field '" + field + "'");
    std::string key = field.substr(0, eq), value = field.substr(eq + 1);
    if (key == "input") {
      auto dims = split_on(value, 'x');
      if (dims.size() != 3) fail(ErrorCode::kFormatError, "input must be CxHxW");
      spec.input = {parse_size(dims[0], "channels"), parse_size(dims[1], "height"),
                    parse_size(dims[2], "width")};
      have_input = true;
    } else if (key == "classes") {
      spec.classes = parse_size(value, "classes");
      have_classes = true;
    } else if (key == "layers") {
      for (const std::string& item : split_on(value, ',')) {
        auto colon = item.find(':');
        std::string kind = item.substr(0, colon);
        std::string arg = colon == std::string::npos ? "" : item.substr(colon + 1);
        if (kind == "affine") {
          spec.layers.push_back({LayerKind::kAffine, parse_size(arg, "affine width"), 0});
        } else if (kind == "conv") {
          auto parts = split_on(arg, 'x');
          if (parts.size() != 2) fail(ErrorCode::kFormatError, "conv must be conv:FxK");
          spec.layers.push_back({LayerKind::kConv, parse_size(parts[0], "filters"),
                                 parse_size(parts[1], "kernel")});
        } else if (kind == "meanpool") {
          spec.layers.push_back({LayerKind::kMeanPool, 0, 0});
        } else if (kind == "sigmoid") {
          spec.layers.push_back({LayerKind::kSigmoid, 0, 0});
        } else if (kind == "tanh") {
          spec.layers.push_back({LayerKind::kTanh, 0, 0});
        } else if (kind == "relu") {
          spec.layers.push_back({LayerKind::kRelu, 0, 0});
        } else {
          fail(ErrorCode::kFormatError, "unknown layer '" + item + "'");
        }
      }
      have_layers = true;
    } else {
      fail(ErrorCode::kFormatError, "unknown architecture key '" + key + "'");
    }
  }
  if (!have_input || !have_classes || !have_layers) {
    fail(ErrorCode::kFormatError, "architecture needs input=, classes= and layers=");
  }
  spec.validate();
  return spec;
}

}  // namespace spin::nn
