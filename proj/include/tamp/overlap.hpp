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

#include <Eigen/Dense>

#include "tamp/tensor.hpp"

namespace tamp {

/// How the mode ratios n_α enter AMP and state evolution for non-cubic
/// shapes. The two choices coincide for cubic tensors.
enum class NoncubicScaling {
  /// Field prefactor n_α/(Δ N^{(p−1)/2}); A_α normalized by (n_β N)⁻¹;
  /// state evolution uses M̄_α = (n_α/Δ) ⊙∏ M_β.
  kLiteral,
  /// Field prefactor 1/(Δ N^{(p−1)/2}); A_α normalized by N⁻¹. This is the
  /// normalization for which E[u] and A_α both equal (n_α Δ)⁻¹ ∏ M_β,
  /// and state evolution uses that M̄_α.
  kConsistent,
};

/// Per-mode r × r order parameters M_α = (n_α N)⁻¹ Σ_i x̂_{αi} x_{αi}ᵀ.
struct OverlapSet {
  int rank = 1;
  std::vector<Eigen::MatrixXd> M;

  int order() const { return static_cast<int>(M.size()); }
  /// r = 1 accessor.
  double scalar(int mode) const { return M[static_cast<std::size_t>(mode)](0, 0); }
};

/// r = 1 overlap set from per-mode scalars.
OverlapSet make_scalar_overlaps(const std::vector<double>& m);

/// Overlap of an estimate with ground truth. Throws on shape or rank mismatch.
OverlapSet overlap(const FactorSet& est, const FactorSet& truth);

/// Self-overlap (n_α N)⁻¹ Σ_i x̂_{αi} x̂_{αi}ᵀ, which the Nishimori identity
/// ties to overlap(est, truth) for Bayes-optimal estimates.
OverlapSet self_overlap(const FactorSet& est);

}  // namespace tamp
