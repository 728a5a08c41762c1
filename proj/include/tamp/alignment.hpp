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

#include <vector>

#include "tamp/overlap.hpp"
#include "tamp/priors.hpp"
#include "tamp/tensor.hpp"

namespace tamp {

struct Alignment {
  FactorSet aligned;
  OverlapSet overlaps;
  /// permutation[ρ] = estimated component placed at truth position ρ.
  std::vector<int> permutation;
};

/// Matches estimated components to truth components greedily by the
/// summed absolute cosine similarity over modes, then fixes the gauge of
/// each matched component: per-mode signs (their product kept at +1) and,
/// when balance_scale is set, per-mode scales c_α with ∏ c_α = 1 chosen so
/// every mode has the same norm ratio to the truth. The reconstructed
/// tensor is unchanged by the gauge. Throws on shape or rank mismatch.
Alignment align_components(const FactorSet& est, const FactorSet& truth, bool balance_scale = true);

/// (1/p) Σ_α ‖x̂_α − x_α‖²_F / (N_α r Var_α), with Var_α the prior
/// variance (1 when it vanishes).
double factor_mse(const FactorSet& est, const FactorSet& truth, const std::vector<PriorSpec>& priors);

/// ‖Ŵ − W‖² / ‖W‖² for the reconstructed low-rank tensors.
double tensor_mse(const FactorSet& est, const FactorSet& truth);

}  // namespace tamp
