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

#include "tamp/state_evolution.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <variant>

#include "tamp/error.hpp"
#include "tamp/rng.hpp"

namespace tamp {

namespace {

double mode_factor(const SeParams& params, int mode) {
  const double n = params.ratios[static_cast<std::size_t>(mode)];
  return params.scaling == NoncubicScaling::kLiteral ? n : 1.0 / n;
}

// E_z[f(A, s + √A z)] for scalar A ≥ 0 and signal s.
double average_over_noise(const PriorSpec& prior, double A, double signal, const GaussHermiteRule& gh) {
  const double sd = std::sqrt(A);
  double acc = 0.0;
  for (std::size_t k = 0; k < gh.nodes.size(); ++k)
    acc += gh.weights[k] * scalar_posterior(prior, A, signal + sd * gh.nodes[k]).mean;
  return acc;
}

// E_{x⁰ ~ N(μ, σ²)}[ E_z f(A, m̄ x⁰ + √A z) x⁰ ] on a tensor-product rule.
double gaussian_component(const PriorSpec& prior, double A, double m_bar, double mu, double sigma2,
                          const GaussHermiteRule& gh) {
  const double sd = std::sqrt(sigma2);
  double acc = 0.0;
  for (std::size_t j = 0; j < gh.nodes.size(); ++j) {
    const double x0 = mu + sd * gh.nodes[j];
    acc += gh.weights[j] * x0 * average_over_noise(prior, A, m_bar * x0, gh);
  }
  return acc;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double scalar_update(const PriorSpec& prior, double m_bar, const GaussHermiteRule& gh) {
  // The channel precision is a variance and cannot be negative; a negative
  // m̄ (anti-aligned overlaps) flips only the sign of the signal term.
  const double A = std::abs(m_bar);
  return std::visit(Overloaded{
                        [&](const GaussianPrior& g) { return gaussian_component(prior, A, m_bar, g.mu, g.sigma2, gh); },
                        [&](const BernoulliPrior& b) { return b.rho * average_over_noise(prior, A, m_bar, gh); },
                        [&](const GaussBernoulliPrior& g) {
                          return g.rho * gaussian_component(prior, A, m_bar, g.mu, g.sigma2, gh);
                        },
                    },
                    prior.value());
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& M) {
  const Eigen::MatrixXd sym = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  Eigen::VectorXd vals = eig.eigenvalues();
  for (Eigen::Index k = 0; k < vals.size(); ++k) vals(k) = vals(k) < 1e-14 ? 0.0 : std::sqrt(vals(k));
  return eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
}

Eigen::MatrixXd monte_carlo_update(const PriorSpec& prior, const Eigen::MatrixXd& m_bar, const SeParams& params,
                                   int mode) {
  const auto r = m_bar.rows();
  const Eigen::MatrixXd A = 0.5 * (m_bar + m_bar.transpose());
  const Eigen::MatrixXd root = psd_sqrt(A);
  const Denoiser denoise(prior, A);
  const std::uint64_t seed = Rng::derive(params.mc_seed, static_cast<std::uint64_t>(mode));
  const RowMatrix x0 = sample_prior(prior, static_cast<std::size_t>(params.mc_samples), static_cast<int>(r), seed);
  Rng noise(Rng::derive(seed, streams::kMonteCarlo));
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(r, r);
  Eigen::VectorXd z(r), u(r), mean(r);
  Eigen::MatrixXd cov(r, r);
  for (Eigen::Index s = 0; s < x0.rows(); ++s) {
    for (Eigen::Index k = 0; k < r; ++k) z(k) = noise.normal();
    const Eigen::VectorXd x = x0.row(s).transpose();
    u.noalias() = m_bar * x + root * z;
    denoise.evaluate(u.data(), mean.data(), cov.data());
    acc.noalias() += mean * x.transpose();
  }
  return acc / static_cast<double>(x0.rows());
}

}  // namespace

void validate(const SeParams& params) {
  if (!(params.delta > 0.0)) throw Error(ErrorCode::kInvalidParameter, "delta must be positive");
  if (params.quad_nodes < 3) throw Error(ErrorCode::kInvalidParameter, "need at least 3 quadrature nodes");
  if (params.rank < 1) throw Error(ErrorCode::kInvalidParameter, "rank must be at least 1");
  if (params.priors.size() != params.ratios.size())
    throw Error(ErrorCode::kInvalidArgument, "need one prior per mode");
  if (params.ratios.size() < 2) throw Error(ErrorCode::kInvalidParameter, "order must be at least 2");
  for (double n : params.ratios)
    if (!(n > 0.0)) throw Error(ErrorCode::kInvalidParameter, "mode ratios must be positive");
}

const GaussHermiteRule& gauss_hermite(int nodes) {
  static std::mutex mu;
  static std::map<int, GaussHermiteRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(nodes);
  if (it != cache.end()) return it->second;

  // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite polynomials.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(nodes, nodes);
  for (int k = 1; k < nodes; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
  GaussHermiteRule rule;
  for (int k = 0; k < nodes; ++k) {
    rule.nodes.push_back(eig.eigenvalues()(k));
    const double v = eig.eigenvectors()(0, k);
    rule.weights.push_back(v * v);
  }
  return cache.emplace(nodes, std::move(rule)).first->second;
}

Eigen::MatrixXd mbar(const OverlapSet& M, const SeParams& params, int mode) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Ones(M.rank, M.rank);
  for (int b = 0; b < M.order(); ++b)
    if (b != mode) out = out.cwiseProduct(M.M[static_cast<std::size_t>(b)]);
  return (mode_factor(params, mode) / params.delta) * out;
}

std::vector<double> se_step_gaussian(const std::vector<double>& m, const SeParams& params) {
  validate(params);
  if (params.rank != 1) throw Error(ErrorCode::kUnsupported, "Gaussian closed form is rank-1 only");
  const OverlapSet M = make_scalar_overlaps(m);
  std::vector<double> out(m.size());
  for (int a = 0; a < M.order(); ++a) {
    const auto* g = std::get_if<GaussianPrior>(&params.priors[static_cast<std::size_t>(a)].value());
    if (g == nullptr) throw Error(ErrorCode::kUnsupported, "closed form needs Gaussian priors");
    const double mb = mbar(M, params, a)(0, 0);
    const double mu2 = g->mu * g->mu;
    out[static_cast<std::size_t>(a)] = (mu2 / g->sigma2 + (g->sigma2 + mu2) * mb) / (1.0 / g->sigma2 + mb);
  }
  return out;
}

OverlapSet se_step_generic(const OverlapSet& M, const SeParams& params) {
  validate(params);
  OverlapSet out{M.rank, {}};
  for (int a = 0; a < M.order(); ++a) {
    const PriorSpec& prior = params.priors[static_cast<std::size_t>(a)];
    const Eigen::MatrixXd mb = mbar(M, params, a);
    if (M.rank == 1) {
      out.M.push_back(Eigen::MatrixXd::Constant(1, 1, scalar_update(prior, mb(0, 0), gauss_hermite(params.quad_nodes))));
    } else {
      out.M.push_back(monte_carlo_update(prior, mb, params, a));
    }
  }
  return out;
}

OverlapSet se_step(const OverlapSet& M, const SeParams& params) {
  bool all_gaussian = M.rank == 1;
  for (const PriorSpec& p : params.priors) all_gaussian = all_gaussian && p.is_gaussian();
  if (!all_gaussian) return se_step_generic(M, params);
  std::vector<double> m;
  for (int a = 0; a < M.order(); ++a) m.push_back(M.scalar(a));
  return make_scalar_overlaps(se_step_gaussian(m, params));
}

OverlapSet se_init(const SeParams& params, InitMode mode) {
  validate(params);
  OverlapSet out{params.rank, {}};
  const int r = params.rank;
  for (const PriorSpec& prior : params.priors) {
    const PriorMoments mom = prior_moments(prior);
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(r, r, mom.mean * mom.mean);
    if (mode == InitMode::kInformed)
      m.diagonal().setConstant(mom.second_moment);
    else
      m.diagonal().array() += 1e-8;
    out.M.push_back(std::move(m));
  }
  return out;
}

SeRun se_fixed_point(const OverlapSet& init, const SeParams& params, double tol, int max_iter) {
  if (!(tol > 0.0)) throw Error(ErrorCode::kInvalidParameter, "tol must be positive");
  SeRun run;
  run.trajectory.push_back(init);
  OverlapSet current = init;
  for (int t = 0; t < max_iter; ++t) {
    OverlapSet next = se_step(current, params);
    double change = 0.0;
    for (int a = 0; a < current.order(); ++a)
      change = std::max(change, (next.M[static_cast<std::size_t>(a)] - current.M[static_cast<std::size_t>(a)])
                                    .cwiseAbs()
                                    .maxCoeff());
    for (const auto& m : next.M)
      if (!m.allFinite()) throw Error(ErrorCode::kDiverged, "state evolution produced non-finite overlaps");
    if (change <= tol) {
      // Converged: `current` already satisfies the tolerance.
      run.converged = true;
      break;
    }
    current = std::move(next);
    run.trajectory.push_back(current);
    run.iterations = t + 1;
  }
  run.fixed_point = current;
  return run;
}

double mse_from_overlap(const OverlapSet& M, const std::vector<PriorSpec>& priors) {
  if (M.rank != 1) throw Error(ErrorCode::kUnsupported, "mse_from_overlap is defined for rank 1");
  if (priors.size() != static_cast<std::size_t>(M.order()))
    throw Error(ErrorCode::kInvalidArgument, "need one prior per mode");
  double total = 0.0;
  for (int a = 0; a < M.order(); ++a) {
    const PriorSpec& prior = priors[static_cast<std::size_t>(a)];
    const double var = prior.variance();
    total += (prior.second_moment() - M.scalar(a)) / (var > 0.0 ? var : 1.0);
  }
  return total / M.order();
}

}  // namespace tamp
