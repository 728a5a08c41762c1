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

#include "tamp/error.hpp"

namespace tamp {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidShape: return "invalid shape";
    case ErrorCode::kInvalidParameter: return "invalid parameter";
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kNumericDomain: return "numeric domain error";
    case ErrorCode::kDiverged: return "diverged";
    case ErrorCode::kUnsupported: return "unsupported";
    case ErrorCode::kTooLarge: return "problem too large";
    case ErrorCode::kBracket: return "bracket error";
    case ErrorCode::kIndeterminate: return "indeterminate";
    case ErrorCode::kSingularSystem: return "singular system";
    case ErrorCode::kConfig: return "config error";
    case ErrorCode::kIo: return "io error";
  }
  return "unknown error";
}

bool Error::is_numerical() const noexcept {
  switch (code_) {
    case ErrorCode::kNumericDomain:
    case ErrorCode::kDiverged:
    case ErrorCode::kIndeterminate:
    case ErrorCode::kSingularSystem:
      return true;
    default:
      return false;
  }
}

}  // namespace tamp
