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

#ifndef SPIN_COMMON_ERROR_H_
#define SPIN_COMMON_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace spin {

// Every failure raised by the library carries one of these codes. The C API
// maps them onto spin_status values one to one.
enum class ErrorCode {
  kShapeMismatch,
  kNonSmoothOpRequested,
  kNotScalarRoot,
  kDetachedTensor,
  kNonFiniteValue,
  kNonFiniteObjective,
  kNonStochasticSoftLabel,
  kBadMagic,
  kCountMismatch,
  kTruncatedFile,
  kInvalidConfig,
  kBadRatios,
  kIncompatibleModels,
  kEmptyList,
  kAllRestartsDiverged,
  kIoError,
  kFormatError,
  kSchemaMismatch,
  kInvalidArgument,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  // Message without the code-name prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

// Same code, message prefixed with `context`.
[[noreturn]] inline void rethrow_with_context(const Error& e, const std::string& context) {
  throw Error(e.code(), context + ": " + e.detail());
}

}  // namespace spin

#endif  // SPIN_COMMON_ERROR_H_
