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
#include <string>
#include <string_view>
#include <variant>

#include <Eigen/Dense>

#include "tamp/tensor.hpp"

namespace tamp {

struct GaussianPrior {
  double mu = 0.0;
  double sigma2 = 1.0;
};

/// Point masses at 0 (probability 1-ρ) and 1 (probability ρ).
struct BernoulliPrior {
  double rho = 0.5;
};

/// Zero with probability 1-ρ, otherwise N(μ, σ²).
struct GaussBernoulliPrior {
  double rho = 0.5;
  double mu = 0.0;
  double sigma2 = 1.0;
};

/// Per-mode prior on the rows x_{αi} ∈ R^r. Components are i.i.d. under
/// the scalar distribution held here.
class PriorSpec {
 public:
  using Variant = std::variant<GaussianPrior, BernoulliPrior, GaussBernoulliPrior>;

  PriorSpec() : value_(GaussianPrior{}) {}
  static PriorSpec gaussian(double mu, double sigma2);
  static PriorSpec bernoulli(double rho);
  static PriorSpec gauss_bernoulli(double rho, double mu, double sigma2);

  /// Parses "gaussian(mu,sigma2)", "bernoulli(rho)" or
  /// "gauss_bernoulli(rho,mu,sigma2)". Throws Error(kConfig).
  static PriorSpec parse(std::string_view text);
  std::string to_string() const;

  const Variant& value() const { return value_; }
  bool is_gaussian() const { return std::holds_alternative<GaussianPrior>(value_); }

  double mean() const;
  double second_moment() const;
  double variance() const { return second_moment() - mean() * mean(); }

  bool operator==(const PriorSpec& other) const { return to_string() == other.to_string(); }

 private:
  explicit PriorSpec(Variant v) : value_(v) {}
  Variant value_;
};

struct PriorMoments {
  double mean = 0.0;
  double second_moment = 0.0;
};

PriorMoments prior_moments(const PriorSpec& prior);

/// Message precision A (symmetric PSD, r × r) and field u (r).
///
/// Convention: the Gibbs weight of the local posterior is
///   P(x) exp(uᵀx − ½ xᵀ A x),
/// i.e. with the factor ½ on the quadratic term. Under this convention the
/// Gaussian-prior denoiser is f = (μ + uσ²)/(Aσ² + 1) and the Gaussian
/// state-evolution closed form follows from the generic one.
struct ChannelState {
  Eigen::MatrixXd A;
  Eigen::VectorXd u;
};

struct Posterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Scalar (r = 1) posterior moments. No validation; A may be any value
/// for which the weight is normalizable.
struct ScalarPosterior {
  double mean;
  double var;
};
ScalarPosterior scalar_posterior(const PriorSpec& prior, double A, double u);

/// The input channel for one mode with its precision A fixed: validates A
/// once, then evaluates f(A, u) and ∂f/∂u for many fields u.
///
/// Throws Error(kNumericDomain) for a non-symmetric or non-PSD A, and for
/// a non-diagonal A under a non-Gaussian prior.
class Denoiser {
 public:
  Denoiser(const PriorSpec& prior, const Eigen::MatrixXd& A);

  int rank() const { return static_cast<int>(A_.rows()); }
  Posterior operator()(const Eigen::Ref<const Eigen::VectorXd>& u) const;
  /// Writes mean into `mean` and covariance into `cov` without allocating.
  void evaluate(const double* u, double* mean, double* cov) const;

 private:
  PriorSpec prior_;
  Eigen::MatrixXd A_;
  Eigen::MatrixXd gaussian_cov_;  // (A + Σ⁻¹)⁻¹, Gaussian prior only
  bool diagonal_ = true;
};

/// f(A, u) = ∂/∂u log Z(A, u).
Eigen::VectorXd posterior_mean(const PriorSpec& prior, const ChannelState& ch);
/// ∂f/∂u = ∂²/∂u∂uᵀ log Z(A, u).
Eigen::MatrixXd posterior_cov(const PriorSpec& prior, const ChannelState& ch);

/// count × rank i.i.d. draws, deterministic given seed.
RowMatrix sample_prior(const PriorSpec& prior, std::size_t count, int rank, std::uint64_t seed);

}  // namespace tamp
