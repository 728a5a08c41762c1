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

#include "tamp/alignment.hpp"

#include <cmath>
#include <limits>

#include "tamp/error.hpp"

namespace tamp {

namespace {

double cosine(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

}  // namespace

Alignment align_components(const FactorSet& est, const FactorSet& truth, bool balance_scale) {
  if (!(est.shape() == truth.shape())) throw Error(ErrorCode::kInvalidArgument, "alignment: shape mismatch");
  if (est.rank() != truth.rank()) throw Error(ErrorCode::kInvalidArgument, "alignment: rank mismatch");
  const int p = est.order();
  const int r = est.rank();

  Eigen::MatrixXd score = Eigen::MatrixXd::Zero(r, r);  // (truth component, est component)
  for (int a = 0; a < p; ++a)
    for (int t = 0; t < r; ++t)
      for (int e = 0; e < r; ++e) score(t, e) += std::abs(cosine(truth.factor(a).col(t), est.factor(a).col(e)));

  std::vector<int> permutation(static_cast<std::size_t>(r), -1);
  std::vector<bool> used_t(static_cast<std::size_t>(r), false), used_e(static_cast<std::size_t>(r), false);
  for (int step = 0; step < r; ++step) {
    double best = -1.0;
    int bt = -1, be = -1;
    for (int t = 0; t < r; ++t)
      for (int e = 0; e < r; ++e)
        if (!used_t[static_cast<std::size_t>(t)] && !used_e[static_cast<std::size_t>(e)] && score(t, e) > best) {
          best = score(t, e);
          bt = t;
          be = e;
        }
    permutation[static_cast<std::size_t>(bt)] = be;
    used_t[static_cast<std::size_t>(bt)] = used_e[static_cast<std::size_t>(be)] = true;
  }

  FactorSet aligned(est.shape(), r);
  for (int t = 0; t < r; ++t) {
    const int e = permutation[static_cast<std::size_t>(t)];
    std::vector<double> sign(static_cast<std::size_t>(p)), ratio(static_cast<std::size_t>(p));
    std::vector<double> corr(static_cast<std::size_t>(p));
    bool degenerate = false;
    double sign_product = 1.0, log_ratio_sum = 0.0;
    for (int a = 0; a < p; ++a) {
      const auto col_e = est.factor(a).col(e);
      const auto col_t = truth.factor(a).col(t);
      corr[static_cast<std::size_t>(a)] = cosine(col_t, col_e);
      sign[static_cast<std::size_t>(a)] = corr[static_cast<std::size_t>(a)] < 0.0 ? -1.0 : 1.0;
      sign_product *= sign[static_cast<std::size_t>(a)];
      const double ne = col_e.norm(), nt = col_t.norm();
      if (ne == 0.0 || nt == 0.0) degenerate = true;
      ratio[static_cast<std::size_t>(a)] = degenerate ? 1.0 : nt / ne;
      log_ratio_sum += std::log(ratio[static_cast<std::size_t>(a)]);
    }
    if (sign_product < 0.0) {
      // An odd number of flips is not a gauge transformation: undo the least certain one.
      int weakest = 0;
      for (int a = 1; a < p; ++a)
        if (std::abs(corr[static_cast<std::size_t>(a)]) < std::abs(corr[static_cast<std::size_t>(weakest)])) weakest = a;
      sign[static_cast<std::size_t>(weakest)] *= -1.0;
    }
    const double geo = std::exp(log_ratio_sum / p);
    for (int a = 0; a < p; ++a) {
      double c = sign[static_cast<std::size_t>(a)];
      if (balance_scale && !degenerate) c *= ratio[static_cast<std::size_t>(a)] / geo;
      aligned.mutable_factor(a).col(t) = c * est.factor(a).col(e);
    }
  }
  Alignment out{std::move(aligned), {}, std::move(permutation)};
  out.overlaps = overlap(out.aligned, truth);
  return out;
}

double factor_mse(const FactorSet& est, const FactorSet& truth, const std::vector<PriorSpec>& priors) {
  if (!(est.shape() == truth.shape()) || est.rank() != truth.rank())
    throw Error(ErrorCode::kInvalidArgument, "factor_mse: shape or rank mismatch");
  if (priors.size() != static_cast<std::size_t>(est.order()))
    throw Error(ErrorCode::kInvalidArgument, "factor_mse: need one prior per mode");
  double total = 0.0;
  for (int a = 0; a < est.order(); ++a) {
    const double var = priors[static_cast<std::size_t>(a)].variance();
    const double n = static_cast<double>(est.factor(a).size());
    total += (est.factor(a) - truth.factor(a)).squaredNorm() / (n * (var > 0.0 ? var : 1.0));
  }
  return total / est.order();
}

double tensor_mse(const FactorSet& est, const FactorSet& truth) {
  const DenseTensor w_hat = low_rank_tensor(est);
  const DenseTensor w = low_rank_tensor(truth);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < w.values().size(); ++k) {
    const double d = w_hat.values()[k] - w.values()[k];
    num += d * d;
    den += w.values()[k] * w.values()[k];
  }
  return den > 0.0 ? num / den : num;
}

}  // namespace tamp
