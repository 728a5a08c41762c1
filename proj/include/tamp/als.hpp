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

#include <cstdint>

#include "tamp/amp.hpp"
#include "tamp/kernels.hpp"
#include "tamp/tensor.hpp"

namespace tamp {

struct AlsConfig {
  int rank = 1;
  double ridge = 1e-10;
  double tol = 1e-8;
  int max_iter = 500;
  std::uint64_t seed = 0;
  kernels::Isa isa = kernels::Isa::kAuto;
};

/// One Gauss-Seidel sweep over modes 1..p. Mode α is replaced by the
/// ridge-regularized least-squares solution
///   X_α = scale · MTTKRP_α(Y) · G⁻¹,  G = scale² ⊙∏_{β≠α} X_βᵀX_β + ridge·I,
/// using the already-updated modes β < α. Throws Error(kSingularSystem)
/// when G cannot be factorized.
FactorSet als_step(const DenseTensor& y, const FactorSet& est, double scale, double ridge = 0.0,
                   kernels::Isa isa = kernels::Isa::kAuto);

/// ‖Y − scale · Σ_ρ ⊗_α x_α^ρ‖².
double als_objective(const DenseTensor& y, const FactorSet& est, double scale);

/// Random standard-normal start, then als_step with scale N^{-(p-1)/2}
/// until the relative factor change is at most tol. Overlaps are recorded
/// when truth is given. The sigma field of the result is empty.
AmpResult run_als(const Observation& obs, const AlsConfig& config, const FactorSet* truth = nullptr);

}  // namespace tamp
