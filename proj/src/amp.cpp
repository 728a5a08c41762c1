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

#include "tamp/amp.hpp"

#include <cmath>
#include <string>

#include "tamp/error.hpp"
#include "tamp/rng.hpp"

namespace tamp {

namespace {

void check_priors(const TensorShape& shape, const std::vector<PriorSpec>& priors) {
  if (priors.size() != static_cast<std::size_t>(shape.order()))
    throw Error(ErrorCode::kInvalidArgument, "need one prior per mode: got " + std::to_string(priors.size()) +
                                                 " for order " + std::to_string(shape.order()));
}

// Σ_i a_i b_iᵀ / norm for two N × r factor matrices.
Eigen::MatrixXd gram(const RowMatrix& a, const RowMatrix& b, double norm) {
  return (a.transpose() * b) / norm;
}

Eigen::MatrixXd hadamard_except(const std::vector<Eigen::MatrixXd>& mats, int skip1, int skip2, int r) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Ones(r, r);
  for (int b = 0; b < static_cast<int>(mats.size()); ++b)
    if (b != skip1 && b != skip2) out = out.cwiseProduct(mats[static_cast<std::size_t>(b)]);
  return out;
}

double mode_norm(const TensorShape& shape, int mode, bool by_mode_size) {
  return by_mode_size ? static_cast<double>(shape.dim(mode)) : shape.n_geo();
}

}  // namespace

OverlapSet make_scalar_overlaps(const std::vector<double>& m) {
  OverlapSet out{1, {}};
  for (double v : m) out.M.push_back(Eigen::MatrixXd::Constant(1, 1, v));
  return out;
}

OverlapSet overlap(const FactorSet& est, const FactorSet& truth) {
  if (!(est.shape() == truth.shape())) throw Error(ErrorCode::kInvalidArgument, "overlap: shape mismatch");
  if (est.rank() != truth.rank()) throw Error(ErrorCode::kInvalidArgument, "overlap: rank mismatch");
  OverlapSet out{est.rank(), {}};
  for (int a = 0; a < est.order(); ++a)
    out.M.push_back(gram(est.factor(a), truth.factor(a), static_cast<double>(est.shape().dim(a))));
  return out;
}

OverlapSet self_overlap(const FactorSet& est) { return overlap(est, est); }

std::vector<Eigen::MatrixXd> precision_matrices(const FactorSet& xhat, double delta, NoncubicScaling scaling) {
  const TensorShape& shape = xhat.shape();
  const int p = shape.order();
  const int r = xhat.rank();
  std::vector<Eigen::MatrixXd> q;
  for (int b = 0; b < p; ++b)
    q.push_back(gram(xhat.factor(b), xhat.factor(b), mode_norm(shape, b, scaling == NoncubicScaling::kLiteral)));
  std::vector<Eigen::MatrixXd> A;
  for (int a = 0; a < p; ++a) A.push_back(hadamard_except(q, a, a, r) / delta);
  return A;
}

AmpState init_state_from(const Observation& obs, const std::vector<PriorSpec>& priors, FactorSet xhat0,
                         const AmpOptions& options) {
  const TensorShape& shape = obs.tensor.shape();
  check_priors(shape, priors);
  if (!(xhat0.shape() == shape)) throw Error(ErrorCode::kInvalidArgument, "initial factors do not match observation");
  const int r = xhat0.rank();

  AmpState state;
  state.xhat_prev = FactorSet(shape, r);
  for (int a = 0; a < shape.order(); ++a) {
    const double var = priors[static_cast<std::size_t>(a)].variance();
    Eigen::MatrixXd s0 = var * Eigen::MatrixXd::Identity(r, r);
    RowMatrix sig(static_cast<Eigen::Index>(shape.dim(a)), r * r);
    for (Eigen::Index i = 0; i < sig.rows(); ++i) sig.row(i) = Eigen::Map<Eigen::RowVectorXd>(s0.data(), r * r);
    state.sigma.push_back(std::move(sig));
  }
  state.A = precision_matrices(xhat0, obs.delta, options.scaling);
  state.xhat = std::move(xhat0);
  state.iteration = 0;
  return state;
}

AmpState init_state(const Observation& obs, const std::vector<PriorSpec>& priors, int rank, InitSpec init,
                    std::uint64_t seed, const FactorSet* truth, const AmpOptions& options) {
  const TensorShape& shape = obs.tensor.shape();
  check_priors(shape, priors);
  if (init.mode == InitMode::kInformed) {
    if (truth == nullptr) throw Error(ErrorCode::kInvalidArgument, "informed init needs the ground truth");
    if (!(truth->shape() == shape) || truth->rank() != rank)
      throw Error(ErrorCode::kInvalidArgument, "truth does not match observation/rank");
    if (!(init.blend >= 0.0 && init.blend <= 1.0))
      throw Error(ErrorCode::kInvalidParameter, "blend must lie in [0, 1]");
  }
  const std::uint64_t init_seed = Rng::derive(seed, streams::kInit);
  std::vector<RowMatrix> x0;
  for (int a = 0; a < shape.order(); ++a) {
    RowMatrix sample = sample_prior(priors[static_cast<std::size_t>(a)], shape.dim(a), rank,
                                    Rng::derive(init_seed, static_cast<std::uint64_t>(a)));
    if (init.mode == InitMode::kInformed) {
      if (init.blend == 1.0)
        sample = truth->factor(a);
      else
        sample = init.blend * truth->factor(a) + (1.0 - init.blend) * sample;
    }
    x0.push_back(std::move(sample));
  }
  return init_state_from(obs, priors, FactorSet(shape, rank, std::move(x0)), options);
}

std::vector<RowMatrix> local_fields(const AmpState& state, const Observation& obs, const AmpOptions& options) {
  const TensorShape& shape = obs.tensor.shape();
  const int p = shape.order();
  const int r = state.xhat.rank();
  const double delta = obs.delta;
  const bool by_mode = options.onsager_norm == OnsagerNorm::kModeSize;

  // Onsager ingredients: C_γ = norm⁻¹ Σ_k x̂ᵗ_γk x̂ᵗ⁻¹_γkᵀ and Σ_β = norm⁻¹ Σ_i σ̂_βi.
  std::vector<Eigen::MatrixXd> cross, sigma_bar;
  for (int g = 0; g < p; ++g) {
    const double norm = mode_norm(shape, g, by_mode);
    cross.push_back(gram(state.xhat.factor(g), state.xhat_prev.factor(g), norm));
    const RowMatrix& s = state.sigma[static_cast<std::size_t>(g)];
    Eigen::RowVectorXd total = s.colwise().sum();
    sigma_bar.push_back(Eigen::Map<Eigen::MatrixXd>(total.data(), r, r) / norm);
  }

  std::vector<RowMatrix> fields;
  fields.reserve(static_cast<std::size_t>(p));
  for (int a = 0; a < p; ++a) {
    const double n_a = options.scaling == NoncubicScaling::kLiteral ? shape.ratio(a) : 1.0;
    const double prefactor = n_a * shape.signal_scale() / delta;
    RowMatrix u = prefactor * mttkrp_exclude(obs.tensor, state.xhat, a, options.isa);
    if (options.onsager) {
      Eigen::MatrixXd reaction = Eigen::MatrixXd::Zero(r, r);
      for (int b = 0; b < p; ++b)
        if (b != a) reaction += sigma_bar[static_cast<std::size_t>(b)].cwiseProduct(hadamard_except(cross, a, b, r));
      // u_αi −= Δ⁻¹ (Σ_β Σ_β ⊙ D_αβ) x̂ᵗ⁻¹_αi
      u.noalias() -= (state.xhat_prev.factor(a) * reaction.transpose()) / delta;
    }
    fields.push_back(std::move(u));
  }
  return fields;
}

AmpState amp_step(const AmpState& state, const Observation& obs, const std::vector<PriorSpec>& priors,
                  const AmpOptions& options) {
  const TensorShape& shape = obs.tensor.shape();
  check_priors(shape, priors);
  if (!(state.xhat.shape() == shape)) throw Error(ErrorCode::kInvalidArgument, "state does not match observation");
  if (!(options.damping >= 0.0 && options.damping < 1.0))
    throw Error(ErrorCode::kInvalidParameter, "damping must lie in [0, 1)");
  const int p = shape.order();
  const int r = state.xhat.rank();
  const double lambda = options.damping;

  const std::vector<RowMatrix> fields = local_fields(state, obs, options);
  const std::vector<Eigen::MatrixXd> A = precision_matrices(state.xhat, obs.delta, options.scaling);

  AmpState next;
  next.xhat = state.xhat;
  next.sigma = state.sigma;
  for (int a = 0; a < p; ++a) {
    const Denoiser denoise(priors[static_cast<std::size_t>(a)], A[static_cast<std::size_t>(a)]);
    const RowMatrix& u = fields[static_cast<std::size_t>(a)];
    RowMatrix& x = next.xhat.mutable_factor(a);
    RowMatrix& sig = next.sigma[static_cast<std::size_t>(a)];
    const auto rows = static_cast<std::ptrdiff_t>(u.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) {
      double mean[16];
      double cov[256];
      std::vector<double> mean_heap, cov_heap;
      double* m = mean;
      double* c = cov;
      if (r > 16) {
        mean_heap.resize(static_cast<std::size_t>(r));
        cov_heap.resize(static_cast<std::size_t>(r * r));
        m = mean_heap.data();
        c = cov_heap.data();
      }
      denoise.evaluate(u.row(i).data(), m, c);
      for (int k = 0; k < r; ++k) x(i, k) = lambda * x(i, k) + (1.0 - lambda) * m[k];
      for (int k = 0; k < r * r; ++k) sig(i, k) = lambda * sig(i, k) + (1.0 - lambda) * c[k];
    }
    if (!x.allFinite() || !sig.allFinite())
      throw Error(ErrorCode::kDiverged, "non-finite estimate in mode " + std::to_string(a + 1) + " at iteration " +
                                            std::to_string(state.iteration + 1));
  }
  next.xhat_prev = state.xhat;
  next.A = precision_matrices(next.xhat, obs.delta, options.scaling);
  next.iteration = state.iteration + 1;
  return next;
}

double relative_change(const FactorSet& next, const FactorSet& prev) {
  double worst = 0.0;
  for (int a = 0; a < next.order(); ++a) {
    const double num = (next.factor(a) - prev.factor(a)).norm();
    worst = std::max(worst, num / (prev.factor(a).norm() + 1e-12));
  }
  return worst;
}

AmpResult run_amp_from(AmpState state, const Observation& obs, const std::vector<PriorSpec>& priors,
                       const AmpOptions& options, const FactorSet* truth) {
  if (!(options.tol > 0.0)) throw Error(ErrorCode::kInvalidParameter, "tol must be positive");
  if (options.max_iter < 1) throw Error(ErrorCode::kInvalidParameter, "max_iter must be at least 1");
  AmpResult result;
  if (truth) result.overlap_trajectory.push_back(overlap(state.xhat, *truth));
  for (int t = 0; t < options.max_iter; ++t) {
    AmpState next = amp_step(state, obs, priors, options);
    result.final_delta_x = relative_change(next.xhat, state.xhat);
    state = std::move(next);
    if (truth) result.overlap_trajectory.push_back(overlap(state.xhat, *truth));
    if (result.final_delta_x <= options.tol) {
      result.converged = true;
      break;
    }
  }
  result.iterations = state.iteration;
  result.factors = std::move(state.xhat);
  result.sigma = std::move(state.sigma);
  return result;
}

AmpResult run_amp(const Observation& obs, const std::vector<PriorSpec>& priors, int rank, InitSpec init,
                  const AmpOptions& options, std::uint64_t seed, const FactorSet* truth) {
  return run_amp_from(init_state(obs, priors, rank, init, seed, truth, options), obs, priors, options, truth);
}

}  // namespace tamp
