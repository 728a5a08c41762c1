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

#include "brute_force.hpp"
#include "doctest.h"
#include "tamp/alignment.hpp"
#include "tamp/amp.hpp"
#include "tamp/error.hpp"
#include "tamp/experiment.hpp"
#include "tamp/state_evolution.hpp"

using namespace tamp;

namespace {

std::vector<PriorSpec> gaussians(std::vector<double> mus) {
  std::vector<PriorSpec> out;
  for (double mu : mus) out.push_back(PriorSpec::gaussian(mu, 1.0));
  return out;
}

double se_mse(const std::vector<PriorSpec>& priors, double delta, InitMode init) {
  SeParams p;
  p.priors = priors;
  p.ratios = cubic_ratios(3);
  p.delta = delta;
  const SeRun run = se_fixed_point(se_init(p, init), p);
  return mse_from_overlap(run.fixed_point, priors);
}

}  // namespace

TEST_CASE("precision matrices are the scaled Hadamard products of self-overlaps") {
  const TensorShape s = make_shape({6, 7, 8});
  const FactorSet x = testing::random_factors(s, 2, 4);
  const auto A = precision_matrices(x, 0.5, NoncubicScaling::kConsistent);
  const double N = s.n_geo();
  Eigen::MatrixXd expect = Eigen::MatrixXd::Ones(2, 2);
  for (int b : {1, 2}) {
    const Eigen::MatrixXd xb = x.factor(b);
    expect = expect.cwiseProduct(xb.transpose() * xb / N);
  }
  CHECK((A[0] - expect / 0.5).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("first local field has no reaction term") {
  const auto priors = gaussians({0.2, 0.2, 0.2});
  const Instance inst = make_instance(make_shape({10, 9, 8}), priors, 1, 0.3, 3);
  const AmpState st = init_state(inst.obs, priors, 1, {}, 9);
  AmpOptions opt;
  opt.scaling = NoncubicScaling::kConsistent;
  const auto u = local_fields(st, inst.obs, opt);
  const RowMatrix direct = mttkrp_exclude(inst.obs.tensor, st.xhat, 1) * (inst.obs.tensor.shape().signal_scale() / 0.3);
  CHECK((u[1] - direct).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("informed AMP reaches the state-evolution MSE in the easy regime") {
  const auto priors = gaussians({0.1, 0.1, 0.3});
  const double delta = 0.08;
  const Instance inst = make_instance(make_shape({80, 80, 80}), priors, 1, delta, 21);
  const AmpResult res = run_amp(inst.obs, priors, 1, {InitMode::kInformed, 1.0}, {}, 21, &inst.truth);
  CHECK(res.converged);
  const Alignment al = align_components(res.factors, inst.truth, false);
  CHECK(std::abs(factor_mse(al.aligned, inst.truth, priors) - se_mse(priors, delta, InitMode::kInformed)) <= 0.1);
  CHECK(res.overlap_trajectory.size() == static_cast<std::size_t>(res.iterations) + 1);
}

TEST_CASE("uninformed AMP stays uninformative in the hard regime") {
  const auto priors = gaussians({0.1, 0.1, 0.3});
  const double delta = 0.22;  // between the two boundaries
  const Instance inst = make_instance(make_shape({60, 60, 60}), priors, 1, delta, 5);
  const AmpResult res = run_amp(inst.obs, priors, 1, {}, {}, 5, &inst.truth);
  const Alignment al = align_components(res.factors, inst.truth, false);
  CHECK(factor_mse(al.aligned, inst.truth, priors) > 0.5);
}

TEST_CASE("Onsager term matters") {
  // Without the reaction term the easy-regime run ends further from the
  // state-evolution prediction.
  const auto priors = gaussians({0.2, 0.2, 0.2});
  const double delta = 0.1;
  const Instance inst = make_instance(make_shape({50, 50, 50}), priors, 1, delta, 8);
  AmpOptions with, without;
  without.onsager = false;
  const AmpResult a = run_amp(inst.obs, priors, 1, {}, with, 8, &inst.truth);
  const AmpResult b = run_amp(inst.obs, priors, 1, {}, without, 8, &inst.truth);
  const double se = se_mse(priors, delta, InitMode::kUninformed);
  const double ea = std::abs(factor_mse(a.factors, inst.truth, priors) - se);
  const double eb = std::abs(factor_mse(b.factors, inst.truth, priors) - se);
  CHECK(ea < eb);
}

TEST_CASE("results are reproducible and independent of the kernel ISA") {
  const auto priors = gaussians({0.2, 0.2, 0.2});
  const Instance inst = make_instance(make_shape({20, 24, 16}), priors, 1, 0.1, 2);
  AmpOptions scalar;
  scalar.isa = kernels::Isa::kScalar;
  const AmpResult a = run_amp(inst.obs, priors, 1, {}, scalar, 4);
  const AmpResult b = run_amp(inst.obs, priors, 1, {}, scalar, 4);
  for (int m = 0; m < 3; ++m) CHECK(a.factors.factor(m) == b.factors.factor(m));
  const AmpResult c = run_amp(inst.obs, priors, 1, {}, {}, 4);
  for (int m = 0; m < 3; ++m) CHECK((a.factors.factor(m) - c.factors.factor(m)).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("AMP agrees with directed belief propagation on a small instance") {
  const std::vector<PriorSpec> priors(3, PriorSpec::gaussian(1.0, 0.25));
  for (std::uint64_t seed : {1, 2}) {
    const Instance inst = make_instance(make_shape({8, 8, 8}), priors, 1, 0.1, seed);
    AmpOptions opt;
    opt.damping = 0.5;
    opt.max_iter = 2000;
    opt.tol = 1e-9;
    const AmpResult amp = run_amp(inst.obs, priors, 1, {}, opt, seed);
    const AmpState start = init_state(inst.obs, priors, 1, {}, seed);
    const FactorSet bp = bp_reference_from(inst.obs, priors, start.xhat, BpOptions{2000, 0.5, true});
    for (int m = 0; m < 3; ++m) CHECK((amp.factors.factor(m) - bp.factor(m)).cwiseAbs().maxCoeff() <= 0.15);
  }
}

TEST_CASE("rank-2 AMP runs and aligns") {
  const auto priors = gaussians({0.0, 0.0, 0.0});
  const Instance inst = make_instance(make_shape({40, 40, 40}), priors, 2, 0.02, 3);
  const AmpResult res = run_amp(inst.obs, priors, 2, {InitMode::kInformed, 1.0}, {}, 3, &inst.truth);
  const Alignment al = align_components(res.factors, inst.truth, false);
  CHECK(factor_mse(al.aligned, inst.truth, priors) < 0.3);
}

TEST_CASE("invalid arguments") {
  const auto priors = gaussians({0.2, 0.2, 0.2});
  const Instance inst = make_instance(make_shape({5, 5, 5}), priors, 1, 0.1, 2);
  AmpOptions bad;
  bad.damping = 1.0;
  CHECK_THROWS_AS(run_amp(inst.obs, priors, 1, {}, bad, 1), Error);
  CHECK_THROWS_AS(run_amp(inst.obs, gaussians({0.2, 0.2}), 1, {}, {}, 1), Error);
  CHECK_THROWS_AS(run_amp(inst.obs, priors, 1, {InitMode::kInformed, 1.0}, {}, 1, nullptr), Error);
  CHECK_THROWS_AS(bp_reference(make_instance(make_shape({60, 60, 60}), priors, 1, 0.1, 2).obs, priors, 1, 1, 1),
                  Error);
}
