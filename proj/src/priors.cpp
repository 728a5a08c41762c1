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

#include "tamp/priors.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <vector>

#include "tamp/error.hpp"
#include "tamp/format.hpp"
#include "tamp/rng.hpp"

namespace tamp {

namespace {

void check_rho(double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) throw Error(ErrorCode::kInvalidParameter, "rho must lie in (0, 1]");
}

void check_sigma2(double sigma2) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
    throw Error(ErrorCode::kInvalidParameter, "sigma2 must be positive");
}

double logistic(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// Probability that the slab (or the atom at 1) is active, from its log-odds.
double activation(double rho, double log_ratio) {
  if (rho >= 1.0) return 1.0;
  return logistic(log_ratio + std::log(rho / (1.0 - rho)));
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::vector<double> parse_args(std::string_view body) {
  std::vector<double> out;
  std::string text(body);
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      for (std::size_t k = used; k < item.size(); ++k)
        if (!std::isspace(static_cast<unsigned char>(item[k]))) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kConfig, "bad prior argument '" + item + "'");
    }
  }
  return out;
}

}  // namespace

PriorSpec PriorSpec::gaussian(double mu, double sigma2) {
  check_sigma2(sigma2);
  return PriorSpec(GaussianPrior{mu, sigma2});
}

PriorSpec PriorSpec::bernoulli(double rho) {
  check_rho(rho);
  return PriorSpec(BernoulliPrior{rho});
}

PriorSpec PriorSpec::gauss_bernoulli(double rho, double mu, double sigma2) {
  check_rho(rho);
  check_sigma2(sigma2);
  return PriorSpec(GaussBernoulliPrior{rho, mu, sigma2});
}

PriorSpec PriorSpec::parse(std::string_view text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  const auto open = s.find('(');
  if (open == std::string::npos || s.back() != ')') throw Error(ErrorCode::kConfig, "bad prior '" + s + "'");
  const std::string name = s.substr(0, open);
  const std::vector<double> args = parse_args(std::string_view(s).substr(open + 1, s.size() - open - 2));
  try {
    if (name == "gaussian" && args.size() == 2) return gaussian(args[0], args[1]);
    if (name == "bernoulli" && args.size() == 1) return bernoulli(args[0]);
    if (name == "gauss_bernoulli" && args.size() == 3) return gauss_bernoulli(args[0], args[1], args[2]);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }
  throw Error(ErrorCode::kConfig, "unknown prior '" + s + "'");
}

std::string PriorSpec::to_string() const {
  std::ostringstream os;
  const auto f = format_double;
  std::visit(Overloaded{
                 [&](const GaussianPrior& g) { os << "gaussian(" << f(g.mu) << ',' << f(g.sigma2) << ')'; },
                 [&](const BernoulliPrior& b) { os << "bernoulli(" << f(b.rho) << ')'; },
                 [&](const GaussBernoulliPrior& g) {
                   os << "gauss_bernoulli(" << f(g.rho) << ',' << f(g.mu) << ',' << f(g.sigma2) << ')';
                 },
             },
             value_);
  return os.str();
}

double PriorSpec::mean() const { return prior_moments(*this).mean; }
double PriorSpec::second_moment() const { return prior_moments(*this).second_moment; }

PriorMoments prior_moments(const PriorSpec& prior) {
  return std::visit(Overloaded{
                        [](const GaussianPrior& g) { return PriorMoments{g.mu, g.sigma2 + g.mu * g.mu}; },
                        [](const BernoulliPrior& b) { return PriorMoments{b.rho, b.rho}; },
                        [](const GaussBernoulliPrior& g) {
                          return PriorMoments{g.rho * g.mu, g.rho * (g.sigma2 + g.mu * g.mu)};
                        },
                    },
                    prior.value());
}

ScalarPosterior scalar_posterior(const PriorSpec& prior, double A, double u) {
  return std::visit(
      Overloaded{
          [&](const GaussianPrior& g) {
            const double precision = A + 1.0 / g.sigma2;
            return ScalarPosterior{(u + g.mu / g.sigma2) / precision, 1.0 / precision};
          },
          [&](const BernoulliPrior& b) {
            // Z = (1-ρ) + ρ exp(u - A/2)
            const double m = activation(b.rho, u - 0.5 * A);
            return ScalarPosterior{m, m * (1.0 - m)};
          },
          [&](const GaussBernoulliPrior& g) {
            // Slab: ∫ N(x; μ, σ²) exp(ux - Ax²/2) dx with precision a and shifted field b.
            const double a = A + 1.0 / g.sigma2;
            const double b = u + g.mu / g.sigma2;
            const double slab_mean = b / a;
            const double log_slab = -0.5 * std::log(g.sigma2 * a) + 0.5 * b * b / a - 0.5 * g.mu * g.mu / g.sigma2;
            const double pi = activation(g.rho, log_slab);
            return ScalarPosterior{pi * slab_mean, pi / a + pi * (1.0 - pi) * slab_mean * slab_mean};
          },
      },
      prior.value());
}

Denoiser::Denoiser(const PriorSpec& prior, const Eigen::MatrixXd& A) : prior_(prior), A_(A) {
  if (A.rows() != A.cols() || A.rows() < 1) throw Error(ErrorCode::kInvalidArgument, "A must be square");
  if (!A.allFinite()) throw Error(ErrorCode::kNumericDomain, "A has non-finite entries");
  const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff()))
    throw Error(ErrorCode::kNumericDomain, "A is not symmetric");
  if (A.rows() == 1) {
    if (A(0, 0) < -1e-10) throw Error(ErrorCode::kNumericDomain, "A is not positive semidefinite");
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-10)
      throw Error(ErrorCode::kNumericDomain, "A is not positive semidefinite");
  }
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      if (i != j && std::abs(A(i, j)) > 1e-12) diagonal_ = false;

  if (const auto* g = std::get_if<GaussianPrior>(&prior.value())) {
    Eigen::MatrixXd precision = A_;
    precision.diagonal().array() += 1.0 / g->sigma2;
    Eigen::LLT<Eigen::MatrixXd> llt(precision);
    if (llt.info() != Eigen::Success) throw Error(ErrorCode::kNumericDomain, "posterior precision not positive");
    gaussian_cov_ = llt.solve(Eigen::MatrixXd::Identity(A.rows(), A.cols()));
  } else if (!diagonal_) {
    throw Error(ErrorCode::kNumericDomain, "non-Gaussian priors need a diagonal precision A for rank > 1");
  }
}

void Denoiser::evaluate(const double* u, double* mean, double* cov) const {
  const Eigen::Index r = A_.rows();
  if (r == 1) {
    const ScalarPosterior s = scalar_posterior(prior_, A_(0, 0), u[0]);
    mean[0] = s.mean;
    cov[0] = s.var;
    return;
  }
  Eigen::Map<Eigen::VectorXd> m(mean, r);
  Eigen::Map<Eigen::MatrixXd> c(cov, r, r);
  Eigen::Map<const Eigen::VectorXd> field(u, r);
  if (const auto* g = std::get_if<GaussianPrior>(&prior_.value())) {
    m.noalias() = gaussian_cov_ * (field.array() + g->mu / g->sigma2).matrix();
    c = gaussian_cov_;
    return;
  }
  c.setZero();
  for (Eigen::Index k = 0; k < r; ++k) {
    const ScalarPosterior s = scalar_posterior(prior_, A_(k, k), field(k));
    m(k) = s.mean;
    c(k, k) = s.var;
  }
}

Posterior Denoiser::operator()(const Eigen::Ref<const Eigen::VectorXd>& u) const {
  if (u.size() != A_.rows()) throw Error(ErrorCode::kInvalidArgument, "field size does not match A");
  Posterior out{Eigen::VectorXd(u.size()), Eigen::MatrixXd(u.size(), u.size())};
  const Eigen::VectorXd field = u;
  evaluate(field.data(), out.mean.data(), out.cov.data());
  return out;
}

Eigen::VectorXd posterior_mean(const PriorSpec& prior, const ChannelState& ch) {
  return Denoiser(prior, ch.A)(ch.u).mean;
}

Eigen::MatrixXd posterior_cov(const PriorSpec& prior, const ChannelState& ch) {
  return Denoiser(prior, ch.A)(ch.u).cov;
}

RowMatrix sample_prior(const PriorSpec& prior, std::size_t count, int rank, std::uint64_t seed) {
  if (count < 1 || rank < 1) throw Error(ErrorCode::kInvalidArgument, "need count >= 1 and rank >= 1");
  Rng rng(seed);
  RowMatrix out(static_cast<Eigen::Index>(count), rank);
  double* x = out.data();
  const std::size_t n = count * static_cast<std::size_t>(rank);
  std::visit(Overloaded{
                 [&](const GaussianPrior& g) {
                   const double sd = std::sqrt(g.sigma2);
                   for (std::size_t k = 0; k < n; ++k) x[k] = g.mu + sd * rng.normal();
                 },
                 [&](const BernoulliPrior& b) {
                   for (std::size_t k = 0; k < n; ++k) x[k] = rng.bernoulli(b.rho) ? 1.0 : 0.0;
                 },
                 [&](const GaussBernoulliPrior& g) {
                   const double sd = std::sqrt(g.sigma2);
                   for (std::size_t k = 0; k < n; ++k) x[k] = rng.bernoulli(g.rho) ? g.mu + sd * rng.normal() : 0.0;
                 },
             },
             prior.value());
  return out;
}

}  // namespace tamp
