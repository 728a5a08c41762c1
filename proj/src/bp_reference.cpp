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

#include <cmath>
#include <string>
#include <vector>

#include "tamp/amp.hpp"
#include "tamp/error.hpp"
#include "tamp/rng.hpp"

namespace tamp {

namespace {

// Nearest PSD matrix (eigenvalues clamped at 0). Directed precisions in the
// general, non-Bayes-simplified form can dip below zero at small N.
Eigen::MatrixXd clamp_psd(const Eigen::MatrixXd& A) {
  if (A.rows() == 1) return Eigen::MatrixXd::Constant(1, 1, std::max(0.0, A(0, 0)));
  const Eigen::MatrixXd sym = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  const Eigen::VectorXd vals = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

FactorSet bp_reference_from(const Observation& obs, const std::vector<PriorSpec>& priors, const FactorSet& init,
                            const BpOptions& options) {
  const TensorShape& shape = obs.tensor.shape();
  if (shape.size() > kBpMaxEntries)
    throw Error(ErrorCode::kTooLarge, "directed BP is limited to " + std::to_string(kBpMaxEntries) + " entries, got " +
                                          std::to_string(shape.size()));
  if (priors.size() != static_cast<std::size_t>(shape.order()))
    throw Error(ErrorCode::kInvalidArgument, "need one prior per mode");
  if (!(init.shape() == shape)) throw Error(ErrorCode::kInvalidArgument, "init does not match observation");
  if (options.iters < 0) throw Error(ErrorCode::kInvalidParameter, "iters must be non-negative");

  const int p = shape.order();
  const auto r = static_cast<Eigen::Index>(init.rank());
  const std::size_t entries = shape.size();
  const double delta = obs.delta;
  const double s1 = shape.signal_scale();  // N^{-(p-1)/2}
  const double s2 = s1 * s1;               // N^{-(p-1)}
  const auto& dims = shape.dims();
  const auto& strides = shape.strides();

  // Node index of entry b along mode α.
  auto node = [&](std::size_t b, int a) { return (b / strides[static_cast<std::size_t>(a)]) % dims[static_cast<std::size_t>(a)]; };

  // Outgoing messages x̂_{αi→b}, σ̂_{αi→b}, indexed [α][b].
  std::vector<std::vector<Eigen::VectorXd>> msg_mean(static_cast<std::size_t>(p));
  std::vector<std::vector<Eigen::MatrixXd>> msg_cov(static_cast<std::size_t>(p));
  for (int a = 0; a < p; ++a) {
    const Eigen::MatrixXd cov0 = priors[static_cast<std::size_t>(a)].variance() * Eigen::MatrixXd::Identity(r, r);
    msg_mean[static_cast<std::size_t>(a)].resize(entries);
    msg_cov[static_cast<std::size_t>(a)].assign(entries, cov0);
    for (std::size_t b = 0; b < entries; ++b)
      msg_mean[static_cast<std::size_t>(a)][b] = init.factor(a).row(static_cast<Eigen::Index>(node(b, a))).transpose();
  }

  std::vector<double> score(entries), second(entries);
  for (std::size_t b = 0; b < entries; ++b) {
    score[b] = obs.tensor.values()[b] / delta;   // S_b
    second[b] = score[b] * score[b] - 1.0 / delta;  // R_b
  }

  FactorSet marginals = init;
  // Per-edge contributions to the fields of node (α, i_α) from entry b.
  std::vector<std::vector<Eigen::VectorXd>> edge_u(static_cast<std::size_t>(p), std::vector<Eigen::VectorXd>(entries));
  std::vector<std::vector<Eigen::MatrixXd>> edge_A(static_cast<std::size_t>(p), std::vector<Eigen::MatrixXd>(entries));

  for (int t = 0; t < options.iters; ++t) {
    std::vector<RowMatrix> node_u, node_A;
    for (int a = 0; a < p; ++a) {
      node_u.push_back(RowMatrix::Zero(static_cast<Eigen::Index>(dims[static_cast<std::size_t>(a)]), r));
      node_A.push_back(RowMatrix::Zero(static_cast<Eigen::Index>(dims[static_cast<std::size_t>(a)]), r * r));
    }
    for (std::size_t b = 0; b < entries; ++b) {
      for (int a = 0; a < p; ++a) {
        Eigen::VectorXd prod_mean = Eigen::VectorXd::Ones(r);
        Eigen::MatrixXd prod_outer = Eigen::MatrixXd::Ones(r, r);
        Eigen::MatrixXd prod_second = Eigen::MatrixXd::Ones(r, r);
        for (int g = 0; g < p; ++g) {
          if (g == a) continue;
          const Eigen::VectorXd& m = msg_mean[static_cast<std::size_t>(g)][b];
          const Eigen::MatrixXd outer = m * m.transpose();
          prod_mean = prod_mean.cwiseProduct(m);
          prod_outer = prod_outer.cwiseProduct(outer);
          prod_second = prod_second.cwiseProduct(msg_cov[static_cast<std::size_t>(g)][b] + outer);
        }
        Eigen::VectorXd eu = s1 * score[b] * prod_mean;
        Eigen::MatrixXd eA = options.bayes_precision
                                 ? Eigen::MatrixXd((s2 / delta) * prod_outer)
                                 : Eigen::MatrixXd(s2 * (score[b] * score[b] * prod_outer - second[b] * prod_second));
        const auto i = static_cast<Eigen::Index>(node(b, a));
        node_u[static_cast<std::size_t>(a)].row(i) += eu.transpose();
        node_A[static_cast<std::size_t>(a)].row(i) += Eigen::Map<const Eigen::RowVectorXd>(eA.data(), r * r);
        edge_u[static_cast<std::size_t>(a)][b] = std::move(eu);
        edge_A[static_cast<std::size_t>(a)][b] = std::move(eA);
      }
    }

    // Cavity messages exclude the target entry's own contribution.
    for (int a = 0; a < p; ++a) {
      const PriorSpec& prior = priors[static_cast<std::size_t>(a)];
      for (std::size_t b = 0; b < entries; ++b) {
        const auto i = static_cast<Eigen::Index>(node(b, a));
        const Eigen::VectorXd u = node_u[static_cast<std::size_t>(a)].row(i).transpose() - edge_u[static_cast<std::size_t>(a)][b];
        const Eigen::MatrixXd A = Eigen::Map<const Eigen::MatrixXd>(node_A[static_cast<std::size_t>(a)].row(i).data(), r, r) -
                                  edge_A[static_cast<std::size_t>(a)][b];
        const Posterior post = Denoiser(prior, clamp_psd(A))(u);
        Eigen::VectorXd& mm = msg_mean[static_cast<std::size_t>(a)][b];
        Eigen::MatrixXd& mc = msg_cov[static_cast<std::size_t>(a)][b];
        mm = options.damping * mm + (1.0 - options.damping) * post.mean;
        mc = options.damping * mc + (1.0 - options.damping) * post.cov;
      }
      for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(dims[static_cast<std::size_t>(a)]); ++i) {
        const Eigen::MatrixXd A = Eigen::Map<const Eigen::MatrixXd>(node_A[static_cast<std::size_t>(a)].row(i).data(), r, r);
        const Posterior post = Denoiser(prior, clamp_psd(A))(node_u[static_cast<std::size_t>(a)].row(i).transpose());
        marginals.mutable_factor(a).row(i) = post.mean.transpose();
      }
    }
    if (!marginals.all_finite()) throw Error(ErrorCode::kDiverged, "directed BP produced non-finite marginals");
  }
  return marginals;
}

FactorSet bp_reference(const Observation& obs, const std::vector<PriorSpec>& priors, int rank, int iters,
                       std::uint64_t seed) {
  const TensorShape& shape = obs.tensor.shape();
  if (shape.size() > kBpMaxEntries)
    throw Error(ErrorCode::kTooLarge, "directed BP is limited to " + std::to_string(kBpMaxEntries) + " entries");
  // Same initial estimate as an uninformed AMP run with this seed.
  const AmpState start = init_state(obs, priors, rank, InitSpec{}, seed);
  BpOptions options;
  options.iters = iters;
  return bp_reference_from(obs, priors, start.xhat, options);
}

}  // namespace tamp
