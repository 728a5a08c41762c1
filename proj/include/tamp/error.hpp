// Copyright 2026 The tamp Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace tamp {

enum class ErrorCode {
  kInvalidShape,
  kInvalidParameter,
  kInvalidArgument,
  kNumericDomain,
  kDiverged,
  kUnsupported,
  kTooLarge,
  kBracket,
  kIndeterminate,
  kSingularSystem,
  kConfig,
  kIo,
};

const char* to_string(ErrorCode code);

/// Library-wide exception. The code lets callers (the CLI in particular)
/// distinguish configuration mistakes from numerical failures.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// True for failures that originate in the numerics rather than in
  /// the inputs (diverged iterations, singular systems, ...).
  bool is_numerical() const noexcept;

 private:
  ErrorCode code_;
};

}  // namespace tamp
