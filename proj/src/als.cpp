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

#include "tamp/als.hpp"

#include <cmath>

#include "tamp/error.hpp"
#include "tamp/rng.hpp"

namespace tamp {

FactorSet als_step(const DenseTensor& y, const FactorSet& est, double scale, double ridge, kernels::Isa isa) {
  if (!(est.shape() == y.shape())) throw Error(ErrorCode::kInvalidArgument, "factor shape does not match tensor");
  if (!(ridge >= 0.0)) throw Error(ErrorCode::kInvalidParameter, "ridge must be non-negative");
  const int p = est.order();
  const int r = est.rank();
  FactorSet next = est;
  for (int a = 0; a < p; ++a) {
    Eigen::MatrixXd G = Eigen::MatrixXd::Ones(r, r);
    for (int b = 0; b < p; ++b)
      if (b != a) G = G.cwiseProduct(next.factor(b).transpose() * next.factor(b));
    G *= scale * scale;
    G.diagonal().array() += ridge;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
    const double max_pivot = ldlt.vectorD().cwiseAbs().maxCoeff();
    const double min_pivot = ldlt.vectorD().cwiseAbs().minCoeff();
    if (ldlt.info() != Eigen::Success || !(max_pivot > 0.0) || min_pivot <= 1e-14 * max_pivot)
      throw Error(ErrorCode::kSingularSystem, "Gram matrix for mode " + std::to_string(a + 1) + " is singular");

    const RowMatrix m = mttkrp_exclude(y, next, a, isa);
    // X_α G = scale · M  ⇔  G X_αᵀ = scale · Mᵀ (G symmetric)
    const Eigen::MatrixXd solved = ldlt.solve(scale * m.transpose());
    next.mutable_factor(a) = solved.transpose();
    if (!next.factor(a).allFinite()) throw Error(ErrorCode::kDiverged, "ALS produced non-finite factors");
  }
  return next;
}

double als_objective(const DenseTensor& y, const FactorSet& est, double scale) {
  const DenseTensor w = low_rank_tensor(est);
  // low_rank_tensor applies N^{-(p-1)/2}; rescale to the requested factor.
  const double ratio = scale / y.shape().signal_scale();
  double total = 0.0;
  for (std::size_t k = 0; k < y.values().size(); ++k) {
    const double d = y.values()[k] - ratio * w.values()[k];
    total += d * d;
  }
  return total;
}

AmpResult run_als(const Observation& obs, const AlsConfig& config, const FactorSet* truth) {
  if (config.rank < 1) throw Error(ErrorCode::kInvalidParameter, "rank must be at least 1");
  if (!(config.tol > 0.0)) throw Error(ErrorCode::kInvalidParameter, "tol must be positive");
  if (config.max_iter < 1) throw Error(ErrorCode::kInvalidParameter, "max_iter must be at least 1");
  const TensorShape& shape = obs.tensor.shape();
  Rng rng(Rng::derive(config.seed, streams::kAls));
  FactorSet est(shape, config.rank);
  for (int a = 0; a < shape.order(); ++a) {
    RowMatrix& f = est.mutable_factor(a);
    for (Eigen::Index i = 0; i < f.rows(); ++i)
      for (Eigen::Index c = 0; c < f.cols(); ++c) f(i, c) = rng.normal();
  }

  const double scale = shape.signal_scale();
  AmpResult result;
  if (truth) result.overlap_trajectory.push_back(overlap(est, *truth));
  for (int t = 0; t < config.max_iter; ++t) {
    FactorSet next = als_step(obs.tensor, est, scale, config.ridge, config.isa);
    result.final_delta_x = relative_change(next, est);
    est = std::move(next);
    result.iterations = t + 1;
    if (truth) result.overlap_trajectory.push_back(overlap(est, *truth));
    if (result.final_delta_x <= config.tol) {
      result.converged = true;
      break;
    }
  }
  result.factors = std::move(est);
  return result;
}

}  // namespace tamp
