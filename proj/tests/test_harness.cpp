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
#include <filesystem>

#include "brute_force.hpp"
#include "doctest.h"
#include "tamp/alignment.hpp"
#include "tamp/config.hpp"
#include "tamp/error.hpp"
#include "tamp/experiment.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace tamp;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
  return parse_config(R"(
[problem]
dims = 20, 18, 22
priors = gaussian(0.2, 1)
deltas = 0.05, 0.3
[algorithm]
max_iter = 100
[run]
seeds = 1, 2, 3
deterministic = true
)");
}

}  // namespace

TEST_CASE("alignment undoes a permutation of components") {
  const TensorShape s = make_shape({6, 5, 7});
  const FactorSet truth = testing::random_factors(s, 3, 1);
  std::vector<RowMatrix> rev;
  for (int a = 0; a < 3; ++a) rev.push_back(truth.factor(a).rowwise().reverse());
  const Alignment al = align_components(FactorSet(s, 3, rev), truth);
  CHECK(al.permutation == std::vector<int>{2, 1, 0});
  for (int a = 0; a < 3; ++a) CHECK(al.aligned.factor(a) == truth.factor(a));
}

TEST_CASE("alignment removes the scale gauge") {
  const TensorShape s = make_shape({6, 5, 7});
  const FactorSet truth = testing::random_factors(s, 1, 2);
  FactorSet est = truth;
  est.mutable_factor(0) *= 2.0;
  est.mutable_factor(1) *= 0.5;
  const Alignment al = align_components(est, truth);
  for (int a = 0; a < 3; ++a) CHECK((al.aligned.factor(a) - truth.factor(a)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("alignment fixes sign pairs but not an odd flip") {
  const TensorShape s = make_shape({8, 8, 8});
  const FactorSet truth = testing::random_factors(s, 1, 3);
  FactorSet est = truth;
  est.mutable_factor(0) *= -1.0;
  est.mutable_factor(2) *= -1.0;
  const Alignment al = align_components(est, truth, false);
  for (int a = 0; a < 3; ++a) CHECK(al.aligned.factor(a) == truth.factor(a));
}

TEST_CASE("alignment leaves the reconstructed tensor unchanged") {
  const TensorShape s = make_shape({5, 6, 4});
  const FactorSet truth = testing::random_factors(s, 3, 4);
  for (std::uint64_t seed : {5, 6, 7}) {
    FactorSet est = testing::random_factors(s, 3, seed);
    est.mutable_factor(1) *= -3.0;
    const Alignment al = align_components(est, truth);
    const DenseTensor a = low_rank_tensor(est), b = low_rank_tensor(al.aligned);
    for (std::size_t k = 0; k < s.size(); ++k) CHECK(std::abs(a.values()[k] - b.values()[k]) <= 1e-12);
  }
}

TEST_CASE("uncorrelated estimates have near-zero overlaps") {
  const TensorShape s = make_shape({10000, 10000});
  const FactorSet truth = testing::random_factors(s, 1, 8);
  const FactorSet est = testing::random_factors(s, 1, 9);
  const Alignment al = align_components(est, truth, false);
  for (int a = 0; a < 2; ++a) CHECK(std::abs(al.overlaps.scalar(a)) <= 5.0 / std::sqrt(10000.0));
}

TEST_CASE("alignment rejects mismatched inputs") {
  const TensorShape s = make_shape({4, 4});
  CHECK_THROWS_AS(align_components(testing::random_factors(s, 2, 1), testing::random_factors(s, 1, 1)), Error);
  CHECK_THROWS_AS(
      align_components(testing::random_factors(s, 1, 1), testing::random_factors(make_shape({4, 5}), 1, 1)), Error);
}

TEST_CASE("metrics") {
  const TensorShape s = make_shape({7, 7, 7});
  const FactorSet truth = testing::random_factors(s, 1, 1);
  const std::vector<PriorSpec> priors(3, PriorSpec::gaussian(0.0, 1.0));
  CHECK(factor_mse(truth, truth, priors) == 0.0);
  CHECK(tensor_mse(truth, truth) == 0.0);
  const FactorSet zero(s, 1);
  CHECK(tensor_mse(zero, truth) == doctest::Approx(1.0));
}

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config(R"(
# comment
[problem]
dims = 30, 24, 37
rank = 2
priors = gaussian(0.1,1); bernoulli(0.3); gauss_bernoulli(0.5,0,1)
deltas = 0.1:0.5:5
[algorithm]
name = compare
init = informed
scaling = consistent
[run]
seeds = 1-3, 10
deterministic = yes
[phase]
nx_grid = 0.5, 1, 2
)");
  CHECK(c.dims == std::vector<std::size_t>{30, 24, 37});
  CHECK(c.rank == 2);
  CHECK(c.priors.size() == 3);
  CHECK(c.priors[1] == PriorSpec::bernoulli(0.3));
  REQUIRE(c.deltas.size() == 5);
  CHECK(c.deltas[4] == doctest::Approx(0.5));
  CHECK(c.algorithm == Algorithm::kCompare);
  CHECK(c.init == InitMode::kInformed);
  CHECK(c.scaling == NoncubicScaling::kConsistent);
  CHECK(c.seeds == std::vector<std::uint64_t>{1, 2, 3, 10});
  CHECK(c.deterministic);
  CHECK(c.nx_grid.size() == 3);
  // Defaults survive and everything round-trips through the echo.
  CHECK(c.damping == 0.3);
  const ExperimentConfig back = parse_config(to_text(c));
  CHECK(to_text(back) == to_text(c));
}

TEST_CASE("config errors") {
  for (const char* bad : {"[problem]\ndims = 10\n", "[problem]\nfoo = 1\n", "[nope]\n", "dims = 1,2\n",
                          "[problem]\ndelta = -1\n", "[algorithm]\ndamping = 1\n", "[problem]\npriors = cauchy(0)\n",
                          "[problem]\npriors = gaussian(0,1); gaussian(0,1)\n", "[run]\nseeds = 5-2\n",
                          "[problem]\nrank = x\n", "[phase]\nmse_threshold = 2\n"}) {
    CAPTURE(bad);
    try {
      parse_config(bad);
      FAIL("expected a config error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kConfig);
    }
  }
}

TEST_CASE("records round-trip through JSON lines") {
  RunRecord r;
  r.algorithm = "amp";
  r.init = "informed";
  r.dims = {3, 4, 5};
  r.priors = {"gaussian(0.1,1)", "gaussian(0.1,1)", "gaussian(0.3,1)"};
  r.delta = 0.1 + 0.2;
  r.damping = 0.3;
  r.tol = 1e-8;
  r.max_iter = 7;
  r.scaling = "literal";
  r.seed = 18446744073709551615ull;
  r.overlaps = {Eigen::MatrixXd::Constant(1, 1, 1.0 / 3.0), Eigen::MatrixXd::Constant(1, 1, -2e-300),
                Eigen::MatrixXd::Constant(1, 1, 0.7)};
  r.factor_mse = 0.123456789012345678;
  r.tensor_mse = 5e-17;
  r.iterations = 42;
  r.converged = true;
  r.wall_time_s = 1.5;
  CHECK(parse_record(serialize(r)) == r);
  RunRecord failed = r;
  failed.overlaps.clear();
  failed.factor_mse.reset();
  failed.tensor_mse.reset();
  failed.seed.reset();
  failed.error = "diverged: \"quoted\"\n";
  CHECK(parse_record(serialize(failed)) == failed);
  CHECK_THROWS_AS(parse_record("{not json"), Error);

  const fs::path path = fs::temp_directory_path() / "tamp_test_harness" / "records.jsonl";
  write_records(path, {r, failed});
  const auto back = read_records(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0] == r);
  CHECK(back[1] == failed);
}

TEST_CASE("run_experiment: records per seed and delta, valid metrics") {
  ExperimentConfig c = small_config();
  const auto recs = run_experiment(c);
  REQUIRE(recs.size() == 6);
  for (const auto& r : recs) {
    CHECK(r.ok());
    CHECK(r.seed.has_value());
    REQUIRE(r.factor_mse.has_value());
    CHECK(std::isfinite(*r.factor_mse));
    CHECK(*r.factor_mse >= 0.0);
    CHECK(*r.tensor_mse >= 0.0);
    CHECK(r.overlaps.size() == 3);
    CHECK(r.wall_time_s == 0.0);
  }
  c.seeds.clear();
  CHECK(run_experiment(c).empty());
}

TEST_CASE("batches are deterministic across runs and worker counts") {
  ExperimentConfig c = small_config();
  c.algorithm = Algorithm::kCompare;
#ifdef _OPENMP
  const int before = omp_get_max_threads();
  omp_set_num_threads(1);
#endif
  const auto one = run_experiment(c);
#ifdef _OPENMP
  omp_set_num_threads(3);
#endif
  const auto three = run_experiment(c);
#ifdef _OPENMP
  omp_set_num_threads(before);
#endif
  const auto again = run_experiment(c);
  REQUIRE(one.size() == three.size());
  for (std::size_t k = 0; k < one.size(); ++k) {
    CHECK(serialize(one[k]) == serialize(three[k]));
    CHECK(serialize(one[k]) == serialize(again[k]));
  }
}

TEST_CASE("module errors are recorded per seed") {
  ExperimentConfig c = small_config();
  c.rank = 2;
  c.priors = {PriorSpec::bernoulli(0.3)};
  c.deltas = {0.1};
  c.seeds = {1, 2};
  const auto recs = run_experiment(c);
  REQUIRE(recs.size() == 2);
  for (const auto& r : recs) {
    CHECK_FALSE(r.ok());
    CHECK_FALSE(r.factor_mse.has_value());
  }
}

TEST_CASE("state-evolution batches give two branches per delta") {
  ExperimentConfig c = small_config();
  c.algorithm = Algorithm::kSe;
  c.priors = {PriorSpec::gaussian(0.1, 1.0), PriorSpec::gaussian(0.1, 1.0), PriorSpec::gaussian(0.3, 1.0)};
  c.dims = {200, 200, 200};
  c.deltas = {0.05, 0.2, 0.5};
  const auto recs = run_experiment(c);
  REQUIRE(recs.size() == 6);
  // Δ = 0.2 sits in the bistable window.
  CHECK(recs[2].init == "informed");
  CHECK(recs[3].init == "uninformed");
  CHECK(*recs[3].factor_mse - *recs[2].factor_mse > 0.3);
  CHECK(std::abs(*recs[0].factor_mse - *recs[1].factor_mse) < 1e-6);
  CHECK_FALSE(recs[0].tensor_mse.has_value());
}

TEST_CASE("compare table and phase summary") {
  ExperimentConfig c = small_config();
  const CompareTable t = compare_amp_als(c);
  REQUIRE(t.rows.size() == 2);
  REQUIRE(t.delta_alg.has_value());
  CHECK(*t.delta_alg > 0.05);
  CHECK(t.rows[0].amp_success_rate >= 0.0);
  CHECK(t.rows[0].amp_success_rate <= 1.0);
  CHECK(t.records.size() == 12);

  c.nx_grid = {0.5, 1.0, 2.0};
  const PhaseSummary ph = run_phase(c);
  CHECK(ph.delta_alg.has_value());
  CHECK(ph.delta_dyn.has_value());
  CHECK(ph.shape_rows.size() == 3);
  c.algorithm = Algorithm::kPhase;
  CHECK_THROWS_AS(run_experiment(c), Error);
}
