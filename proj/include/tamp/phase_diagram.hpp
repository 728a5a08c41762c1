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

#include <filesystem>
#include <vector>

#include "tamp/state_evolution.hpp"

namespace tamp {

enum class MseClass { kLow, kHigh };

/// A rank-1 phase-boundary query on the state-evolution recursion.
struct PhaseQuery {
  std::vector<PriorSpec> priors;
  std::vector<double> ratios;
  double lo = 1e-4;
  double hi = 10.0;
  double mse_threshold = 0.5;
  double bisect_tol = 1e-4;
  double se_tol = 1e-10;
  int se_max_iter = 10000;
  int quad_nodes = 41;
  NoncubicScaling scaling = NoncubicScaling::kLiteral;
};

/// Throws Error(kInvalidParameter) for lo >= hi, a threshold outside
/// (0, 1), or a non-positive bisection tolerance.
void validate(const PhaseQuery& query);

SeParams se_params(const PhaseQuery& query, double delta);

/// Fixed-point MSE from the given start. Throws Error(kIndeterminate) if
/// the recursion does not converge within se_max_iter.
double fixed_point_mse(const PhaseQuery& query, double delta, InitMode init);

/// low iff the fixed-point MSE is below the threshold.
MseClass classify_delta(const PhaseQuery& query, double delta, InitMode init);

/// Upper edge of the easy regime (uninformed start). Returns 0 when the
/// uninformed start is already high at query.lo. Throws Error(kBracket)
/// if it is still low at query.hi.
double find_delta_alg(const PhaseQuery& query);

/// Upper edge of the hard regime (informed start). Throws Error(kBracket)
/// unless the informed start is low at lo and high at hi.
double find_delta_dyn(const PhaseQuery& query);

struct ShapeRow {
  double nx;
  double delta_alg;
  double delta_dyn;
};

/// p = 3 only: boundaries for n = (1, n_x, 1/n_x).
std::vector<ShapeRow> sweep_shape(const PhaseQuery& query, const std::vector<double>& nx_grid);

struct MeansRow {
  double mu1;
  double mu2;
  double delta_alg;
  double delta_dyn;
};

/// p = 3, Gaussian priors (variances taken from query.priors): boundaries
/// over (μ1, μ2) with μ3 = 0. Δ_alg is reported as 0 when two or more
/// means are zero.
std::vector<MeansRow> sweep_means(const PhaseQuery& query, const std::vector<double>& mu1_grid,
                                  const std::vector<double>& mu2_grid);

void write_shape_csv(const std::filesystem::path& path, const std::vector<ShapeRow>& rows);
void write_means_csv(const std::filesystem::path& path, const std::vector<MeansRow>& rows);

}  // namespace tamp
