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

#include <cstddef>

namespace tamp::kernels {

enum class Isa { kAuto, kScalar, kAvx2 };

const char* to_string(Isa isa);

/// One MTTKRP over a tensor viewed as [left, mid, right]:
///   out[ρ][i] = Σ_l left_kr[l][ρ] Σ_k y[l][i][k] right_kr[ρ][k]
/// left_kr is row-major left × rank, right_kr is rank × right (each
/// component contiguous), out is rank × mid (each component contiguous).
struct MttkrpProblem {
  const double* y = nullptr;
  std::size_t left = 1;
  std::size_t mid = 1;
  std::size_t right = 1;
  int rank = 1;
  const double* left_kr = nullptr;
  const double* right_kr = nullptr;
  double* out = nullptr;
};

void mttkrp_scalar(const MttkrpProblem& problem);
#if defined(TAMP_HAVE_AVX2_KERNELS)
void mttkrp_avx2(const MttkrpProblem& problem);
#endif

bool isa_available(Isa isa);

/// Best ISA on this machine, unless overridden by set_default_isa or the
/// TAMP_ISA environment variable ("scalar" / "avx2").
Isa default_isa();
void set_default_isa(Isa isa);

/// Resolves kAuto and dispatches. Throws Error(kUnsupported) when an
/// explicitly requested ISA is unavailable.
void mttkrp(const MttkrpProblem& problem, Isa isa = Isa::kAuto);

}  // namespace tamp::kernels
