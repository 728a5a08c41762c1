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
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "tamp/kernels.hpp"
#include "tamp/overlap.hpp"
#include "tamp/priors.hpp"
#include "tamp/tensor.hpp"

namespace tamp {

enum class InitMode { kUninformed, kInformed };

struct InitSpec {
  InitMode mode = InitMode::kUninformed;
  /// Informed only: x̂⁰ = blend·truth + (1 − blend)·prior sample.
  double blend = 1.0;
};

/// Normalization of Σ_β and of the D_{αβ} factors in the Onsager term.
enum class OnsagerNorm {
  kGeometricMean,  ///< N⁻¹ Σ over all N_β entries
  kModeSize,       ///< (n_β N)⁻¹ Σ
};

struct AmpOptions {
  double damping = 0.3;
  double tol = 1e-8;
  int max_iter = 500;
  NoncubicScaling scaling = NoncubicScaling::kLiteral;
  OnsagerNorm onsager_norm = OnsagerNorm::kGeometricMean;
  /// Off only for regression tests against the uncorrected iteration.
  bool onsager = true;
  kernels::Isa isa = kernels::Isa::kAuto;
};

/// Iterate of the algorithm between steps. Per-node covariances σ̂_{αi}
/// are stored one per row of sigma[α] (N_α × r², row-major r × r blocks).
struct AmpState {
  FactorSet xhat;
  FactorSet xhat_prev;
  std::vector<RowMatrix> sigma;
  std::vector<Eigen::MatrixXd> A;
  int iteration = 0;

  Eigen::Map<const Eigen::MatrixXd> node_sigma(int mode, Eigen::Index i) const {
    const RowMatrix& s = sigma[static_cast<std::size_t>(mode)];
    const auto r = static_cast<Eigen::Index>(xhat.rank());
    return Eigen::Map<const Eigen::MatrixXd>(s.row(i).data(), r, r);
  }
};

struct AmpResult {
  FactorSet factors;
  std::vector<RowMatrix> sigma;
  /// Overlap with the truth at t = 0, 1, ..., when truth was supplied.
  std::vector<OverlapSet> overlap_trajectory;
  int iterations = 0;
  bool converged = false;
  double final_delta_x = 0.0;
};

/// Throws Error(kInvalidArgument) if priors.size() != p or an informed
/// init lacks truth.
AmpState init_state(const Observation& obs, const std::vector<PriorSpec>& priors, int rank, InitSpec init,
                    std::uint64_t seed, const FactorSet* truth = nullptr,
                    const AmpOptions& options = {});

/// State whose first estimate is exactly `xhat0`; σ̂⁰ = prior variance · I.
AmpState init_state_from(const Observation& obs, const std::vector<PriorSpec>& priors, FactorSet xhat0,
                         const AmpOptions& options = {});

/// A_α = Δ⁻¹ ⊙∏_{β≠α} Q_β with Q_β the normalized Gram matrix of x̂_β.
std::vector<Eigen::MatrixXd> precision_matrices(const FactorSet& xhat, double delta, NoncubicScaling scaling);

/// Fields u_{αi} (N_α × r per mode) for the current state, Onsager term included.
std::vector<RowMatrix> local_fields(const AmpState& state, const Observation& obs, const AmpOptions& options);

/// One parallel (all modes at once) update. Throws Error(kDiverged) on
/// non-finite values; numeric-domain errors from the priors propagate.
AmpState amp_step(const AmpState& state, const Observation& obs, const std::vector<PriorSpec>& priors,
                  const AmpOptions& options);

/// max_α ‖x̂_α − x̂'_α‖_F / (‖x̂'_α‖_F + 1e-12).
double relative_change(const FactorSet& next, const FactorSet& prev);

AmpResult run_amp(const Observation& obs, const std::vector<PriorSpec>& priors, int rank, InitSpec init,
                  const AmpOptions& options, std::uint64_t seed, const FactorSet* truth = nullptr);

/// Continues from a prepared state.
AmpResult run_amp_from(AmpState state, const Observation& obs, const std::vector<PriorSpec>& priors,
                       const AmpOptions& options, const FactorSet* truth = nullptr);

/// Directed-message belief propagation (messages u_{αi→a}, A_{αi→a} on
/// every edge, no mean-field collapse). A validation oracle for small
/// problems: throws Error(kTooLarge) above 10⁵ tensor entries.
struct BpOptions {
  int iters = 50;
  double damping = 0.0;
  /// Bayes-optimal precision A_{b→αi} = Δ⁻¹ N^{-(p-1)} ⊙∏ x̂x̂ᵀ. When false,
  /// the general form with S_b = Y_b/Δ, R_b = S_b² − 1/Δ:
  ///   N^{-(p-1)} [S_b² ⊙∏ x̂x̂ᵀ − R_b ⊙∏ (σ̂ + x̂x̂ᵀ)], clamped to PSD.
  bool bayes_precision = true;
};

FactorSet bp_reference(const Observation& obs, const std::vector<PriorSpec>& priors, int rank, int iters,
                       std::uint64_t seed);
/// Same, starting every outgoing message at the rows of `init`.
FactorSet bp_reference_from(const Observation& obs, const std::vector<PriorSpec>& priors, const FactorSet& init,
                            const BpOptions& options);

inline constexpr std::size_t kBpMaxEntries = 100000;

}  // namespace tamp
