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
#include <vector>

#include <Eigen/Dense>

#include "tamp/amp.hpp"
#include "tamp/overlap.hpp"
#include "tamp/priors.hpp"

namespace tamp {

/// Parameters of the state-evolution recursion.
struct SeParams {
  std::vector<PriorSpec> priors;
  /// Mode ratios n_α = N_α / N (product 1). Only the ratios enter, so
  /// shapes like n = (1, n_x, 1/n_x) need no integer dimensions; for a
  /// concrete tensor pass shape.ratios().
  std::vector<double> ratios;
  double delta = 1.0;
  int rank = 1;
  /// Gauss-Hermite nodes per Gaussian integral.
  int quad_nodes = 41;
  /// Monte-Carlo sample count and seed for rank > 1.
  int mc_samples = 20000;
  std::uint64_t mc_seed = 0x5eed;
  NoncubicScaling scaling = NoncubicScaling::kLiteral;
};

inline std::vector<double> cubic_ratios(int order) { return std::vector<double>(static_cast<std::size_t>(order), 1.0); }

/// Throws Error(kInvalidParameter) unless delta > 0, K >= 3 and the prior
/// count matches the ratio count.
void validate(const SeParams& params);

/// Probabilists' Gauss-Hermite rule: Σ_k w_k g(t_k) ≈ E[g(Z)], Z ~ N(0,1).
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussHermiteRule& gauss_hermite(int nodes);

/// M̄_α = (n_α/Δ) ⊙∏_{β≠α} M_β (literal scaling), or with 1/(n_α Δ).
Eigen::MatrixXd mbar(const OverlapSet& M, const SeParams& params, int mode);

/// Closed-form Gaussian-prior update, r = 1:
///   m' = (μ²/σ² + (σ² + μ²) m̄) / (σ⁻² + m̄).
/// Throws Error(kUnsupported) for non-Gaussian priors.
std::vector<double> se_step_gaussian(const std::vector<double>& m, const SeParams& params);

/// M'_α = E_{x⁰, z}[ f_α(M̄_α, M̄_α x⁰ + √M̄_α z) x⁰ᵀ ] by Gauss-Hermite
/// quadrature (r = 1) or Monte Carlo over (x⁰, z) (r > 1).
/// Throws Error(kUnsupported) for a rank-1-only prior at r > 1 with a
/// non-diagonal M̄ (propagated from the priors).
OverlapSet se_step_generic(const OverlapSet& M, const SeParams& params);

/// Closed form when every prior is Gaussian and r = 1, generic otherwise.
OverlapSet se_step(const OverlapSet& M, const SeParams& params);

/// Starting point: informed = E[x xᵀ] under each prior (perfect overlap);
/// uninformed = E[x] E[x]ᵀ + 1e-8 I.
OverlapSet se_init(const SeParams& params, InitMode mode);

struct SeRun {
  OverlapSet fixed_point;
  std::vector<OverlapSet> trajectory;  ///< trajectory[0] is the start
  int iterations = 0;
  bool converged = false;
};

/// Iterates se_step until max |M' − M| <= tol. Hitting max_iter sets
/// converged = false; it is not an error.
SeRun se_fixed_point(const OverlapSet& init, const SeParams& params, double tol = 1e-10, int max_iter = 10000);

/// Error normalized per mode by the prior variance:
///   (1/p) Σ_α (E[x²] − m_α) / Var(x),
/// which for Gaussian priors is (1/p) Σ_α (1 + μ²/σ² − m_α/σ²). r = 1.
double mse_from_overlap(const OverlapSet& M, const std::vector<PriorSpec>& priors);

}  // namespace tamp
