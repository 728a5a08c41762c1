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

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "tamp/error.hpp"
#include "tamp/kernels.hpp"

namespace tamp::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(TAMP_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("TAMP_ISA")) {
    if (std::strcmp(env, "scalar") == 0) return Isa::kScalar;
    if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return Isa::kAvx2;
  }
  return cpu_has_avx2() ? Isa::kAvx2 : Isa::kScalar;
}

std::atomic<Isa>& default_slot() {
  static std::atomic<Isa> slot{detect()};
  return slot;
}

}  // namespace

const char* to_string(Isa isa) {
  switch (isa) {
    case Isa::kAuto: return "auto";
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::kAuto:
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
      return cpu_has_avx2();
  }
  return false;
}

Isa default_isa() { return default_slot().load(); }

void set_default_isa(Isa isa) {
  if (isa == Isa::kAuto) isa = detect();
  if (!isa_available(isa))
    throw Error(ErrorCode::kUnsupported, std::string("kernel ISA not available: ") + to_string(isa));
  default_slot().store(isa);
}

void mttkrp(const MttkrpProblem& problem, Isa isa) {
  if (isa == Isa::kAuto) isa = default_isa();
  switch (isa) {
    case Isa::kAvx2:
#if defined(TAMP_HAVE_AVX2_KERNELS)
      if (cpu_has_avx2()) {
        mttkrp_avx2(problem);
        return;
      }
#endif
      throw Error(ErrorCode::kUnsupported, "AVX2 kernels not available on this machine");
    case Isa::kScalar:
    case Isa::kAuto:
      mttkrp_scalar(problem);
      return;
  }
}

}  // namespace tamp::kernels
