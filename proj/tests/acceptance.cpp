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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. `acceptance --only K` runs criterion K alone.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "brute_force.hpp"
#include "quadrature_oracle.hpp"
#include "tamp/alignment.hpp"
#include "tamp/amp.hpp"
#include "tamp/experiment.hpp"
#include "tamp/phase_diagram.hpp"
#include "tamp/priors.hpp"
#include "tamp/rng.hpp"
#include "tamp/state_evolution.hpp"
#include "tamp/tensor.hpp"

using namespace tamp;
using namespace tamp::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

/// Records the first failure; later checks only append detail.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && outcome_.pass) {
      outcome_.pass = false;
      outcome_.detail = what;
    }
  }
  void note(const std::string& what) {
    if (outcome_.pass) outcome_.detail = what;
  }
  Outcome outcome() const { return outcome_; }

 private:
  Outcome outcome_;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), pattern, args...);
  return buf;
}

std::vector<PriorSpec> gaussians(const std::vector<double>& mus, double sigma2 = 1.0) {
  std::vector<PriorSpec> out;
  for (double mu : mus) out.push_back(PriorSpec::gaussian(mu, sigma2));
  return out;
}

PhaseQuery query(const std::vector<double>& mus, const std::vector<double>& ratios) {
  PhaseQuery q;
  q.priors = gaussians(mus);
  q.ratios = ratios;
  return q;
}

std::vector<PriorSpec> oracle_priors() {
  return {PriorSpec::gaussian(0.3, 1.5),           PriorSpec::gaussian(-1.0, 0.25),
          PriorSpec::bernoulli(0.2),               PriorSpec::bernoulli(0.7),
          PriorSpec::gauss_bernoulli(0.3, 0.5, 2.0), PriorSpec::gauss_bernoulli(0.1, -0.4, 0.5)};
}

double scalar_mean(const PriorSpec& prior, double A, double u) {
  return posterior_mean(prior, ChannelState{Eigen::MatrixXd::Constant(1, 1, A), Eigen::VectorXd::Constant(1, u)})(0);
}

double scalar_cov(const PriorSpec& prior, double A, double u) {
  return posterior_cov(prior, ChannelState{Eigen::MatrixXd::Constant(1, 1, A), Eigen::VectorXd::Constant(1, u)})(0, 0);
}

// 1. Posterior moments against adaptive quadrature and the frozen scipy
// table; covariance against a central difference of the mean.
Outcome prior_oracle() {
  Checker c;
  double worst_mean = 0, worst_var = 0, worst_fd = 0;
  Rng rng(2026);
  const double h = 1e-5;
  for (const auto& prior : oracle_priors()) {
    for (int k = 0; k < 100; ++k) {
      const double A = std::pow(10.0, rng.uniform(-2.0, 1.0));
      const double u = rng.uniform(-5.0, 5.0);
      const ScalarPosterior ref = oracle::quadrature_posterior(prior, A, u);
      const double mean = scalar_mean(prior, A, u), var = scalar_cov(prior, A, u);
      worst_mean = std::max(worst_mean, std::abs(mean - ref.mean));
      worst_var = std::max(worst_var, std::abs(var - ref.var));
      const double fd = (scalar_mean(prior, A, u + h) - scalar_mean(prior, A, u - h)) / (2 * h);
      worst_fd = std::max(worst_fd, std::abs(var - fd));
    }
  }
  const auto table = oracle::read_prior_table(std::string(TAMP_TEST_DATA) + "/prior_oracle.csv");
  for (const auto& row : table) {
    worst_mean = std::max(worst_mean, std::abs(scalar_mean(row.prior, row.A, row.u) - row.mean));
    worst_var = std::max(worst_var, std::abs(scalar_cov(row.prior, row.A, row.u) - row.var));
  }
  const int rows = static_cast<int>(table.size());
  c.expect(rows == 600, fmt("frozen table has %d rows, expected 600", rows));
  c.expect(worst_mean <= 1e-8, fmt("mean error %.3g > 1e-8", worst_mean));
  c.expect(worst_var <= 1e-8, fmt("variance error %.3g > 1e-8", worst_var));
  c.expect(worst_fd <= 1e-5, fmt("finite-difference error %.3g > 1e-5", worst_fd));
  c.note(fmt("max |mean err| %.2g, |var err| %.2g, |cov - dmean/du| %.2g", worst_mean, worst_var, worst_fd));
  return c.outcome();
}

// 2. Closed-form Gaussian SE step against the generic quadrature step.
Outcome closed_form_se() {
  Checker c;
  Rng rng(2027);
  double worst = 0;
  for (int k = 0; k < 50; ++k) {
    SeParams p;
    for (int a = 0; a < 3; ++a) p.priors.push_back(PriorSpec::gaussian(rng.uniform(-1.0, 1.0), rng.uniform(0.2, 3.0)));
    p.ratios = cubic_ratios(3);
    p.delta = rng.uniform(0.05, 3.0);
    std::vector<double> m;
    for (int a = 0; a < 3; ++a) m.push_back(rng.uniform(0.0, 2.0));
    const auto closed = se_step_gaussian(m, p);
    const OverlapSet generic = se_step_generic(make_scalar_overlaps(m), p);
    for (int a = 0; a < 3; ++a) worst = std::max(worst, std::abs(closed[static_cast<std::size_t>(a)] - generic.scalar(a)));
  }
  c.expect(worst <= 1e-6, fmt("max difference %.3g > 1e-6", worst));
  c.note(fmt("max difference %.2g over 50 points", worst));
  return c.outcome();
}

// 3. Zero-mean priors: the uninformative point is stable in SE and AMP.
Outcome zero_mean() {
  Checker c;
  const auto priors = gaussians({0, 0, 0});
  double worst_se = 0;
  for (double delta : {0.01, 0.1, 1.0, 10.0}) {
    SeParams p;
    p.priors = priors;
    p.ratios = cubic_ratios(3);
    p.delta = delta;
    const SeRun run = se_fixed_point(make_scalar_overlaps({1e-6, 1e-6, 1e-6}), p, 1e-14);
    for (int a = 0; a < 3; ++a) worst_se = std::max(worst_se, std::abs(run.fixed_point.scalar(a)));
  }
  c.expect(worst_se < 1e-9, fmt("SE overlap %.3g >= 1e-9", worst_se));
  const double bound = 5.0 / std::sqrt(200.0);
  double worst_amp = 0;
  for (double delta : {0.1, 1.0}) {
    const Instance inst = make_instance(make_shape({200, 200, 200}), priors, 1, delta, 3);
    const AmpResult res = run_amp(inst.obs, priors, 1, {}, {}, 3, &inst.truth);
    const OverlapSet m = overlap(res.factors, inst.truth);
    for (int a = 0; a < 3; ++a) worst_amp = std::max(worst_amp, std::abs(m.scalar(a)));
  }
  c.expect(worst_amp < bound, fmt("AMP overlap %.3g >= %.3g", worst_amp, bound));
  c.note(fmt("SE max |m| %.2g; AMP (N=200) max |m| %.3f < %.3f", worst_se, worst_amp, bound));
  return c.outcome();
}

double se_mse(const std::vector<PriorSpec>& priors, double delta, InitMode init) {
  PhaseQuery q;
  q.priors = priors;
  q.ratios = cubic_ratios(3);
  return fixed_point_mse(q, delta, init);
}

/// Mean aligned factor MSE over the seeds of a batch, per Δ.
std::map<double, double> mean_mse(const std::vector<RunRecord>& records, Checker& c) {
  std::map<double, double> sum;
  std::map<double, int> count;
  for (const auto& r : records) {
    c.expect(r.ok(), "run failed: " + r.error);
    if (!r.ok()) continue;
    sum[r.delta] += *r.factor_mse;
    ++count[r.delta];
  }
  for (auto& [d, s] : sum) s /= count[d];
  return sum;
}

// 4. Means (0.1, 0.1, 0.3): bistable window in SE; AMP at N = 200 tracks
// the SE branch of its initialization.
Outcome bistable_window() {
  Checker c;
  const auto priors = gaussians({0.1, 0.1, 0.3});
  const PhaseQuery q = query({0.1, 0.1, 0.3}, cubic_ratios(3));
  const double alg = find_delta_alg(q), dyn = find_delta_dyn(q);
  double gap = 0;
  for (double d = alg; d < dyn; d += (dyn - alg) / 20)
    gap = std::max(gap, se_mse(priors, d, InitMode::kUninformed) - se_mse(priors, d, InitMode::kInformed));
  c.expect(gap > 0.3, fmt("largest informed/uninformed SE gap %.3f <= 0.3", gap));

  // At N = 200 the empirical truth means fluctuate by ~1/√N, which moves
  // each instance's own Δ_alg over roughly [0.05, 0.13] and its informed
  // fold below Δ_dyn; the points avoid those finite-size bands.
  const std::vector<double> deltas{0.01, 0.02, 0.03, 0.16, 0.18, 0.2, 0.4, 0.8};
  ExperimentConfig cfg;
  cfg.dims = {200, 200, 200};
  cfg.priors = priors;
  cfg.deltas = deltas;
  cfg.seeds.clear();
  for (std::uint64_t s = 1; s <= 10; ++s) cfg.seeds.push_back(s);
  cfg.algorithm = Algorithm::kAmp;
  cfg.init = InitMode::kUninformed;
  const auto uninformed = mean_mse(run_experiment(cfg), c);
  // Inside the window the informed branch differs; check it as well.
  cfg.deltas.clear();
  for (double d : deltas)
    if (d > alg && d < dyn) cfg.deltas.push_back(d);
  cfg.init = InitMode::kInformed;
  const auto informed = mean_mse(run_experiment(cfg), c);

  int matched = 0;
  std::string table;
  for (double d : deltas) {
    bool ok = std::abs(uninformed.at(d) - se_mse(priors, d, InitMode::kUninformed)) <= 0.1;
    if (informed.count(d)) ok = ok && std::abs(informed.at(d) - se_mse(priors, d, InitMode::kInformed)) <= 0.1;
    matched += ok;
    if (!ok) table += fmt(" miss@%.2f", d);
  }
  c.expect(matched >= 7, fmt("AMP matches SE at %d/8 points;%s", matched, table.c_str()));
  c.note(fmt("window [%.4f, %.4f], max gap %.3f; AMP within 0.1 of SE at %d/8 points", alg, dyn, gap, matched));
  return c.outcome();
}

// 5. Means sweep with μ3 = 0.
Outcome means_sweep() {
  Checker c;
  const PhaseQuery q = query({0, 0, 0}, cubic_ratios(3));
  const std::vector<double> grid{0.0, 0.1, 0.2, 0.3};
  const auto rows = sweep_means(q, grid, grid);
  auto at = [&](double m1, double m2) {
    for (const auto& r : rows)
      if (r.mu1 == m1 && r.mu2 == m2) return r;
    throw std::runtime_error("missing grid cell");
  };
  c.expect(std::isfinite(at(0.3, 0.0).delta_dyn) && at(0.3, 0.0).delta_dyn < q.hi,
           "Δ_dyn not finite for (0.3, 0)");
  c.expect(at(0.0, 0.0).delta_alg == 0.0, fmt("Δ_alg(0, 0) = %.3g != 0", at(0.0, 0.0).delta_alg));
  c.expect(at(0.3, 0.3).delta_alg > 0.0, "Δ_alg(0.3, 0.3) is not positive");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const auto prev = at(grid[k - 1], grid[k - 1]), cur = at(grid[k], grid[k]);
    c.expect(cur.delta_alg >= prev.delta_alg, fmt("Δ_alg decreases along the diagonal at μ = %.1f", grid[k]));
    c.expect(cur.delta_dyn >= prev.delta_dyn, fmt("Δ_dyn decreases along the diagonal at μ = %.1f", grid[k]));
  }
  c.note(fmt("Δ_dyn(0.3,0) = %.4f, Δ_alg(0,0) = %g, Δ_alg(0.3,0.3) = %.4f, diagonal monotone",
             at(0.3, 0.0).delta_dyn, at(0.0, 0.0).delta_alg, at(0.3, 0.3).delta_alg));
  return c.outcome();
}

// 6. Shape sweep n = (1, n_x, 1/n_x): the window is widest at n_x = 1 and
// symmetric under n_x ↔ 1/n_x.
Outcome shape_sweep() {
  Checker c;
  const PhaseQuery q = query({0.2, 0.2, 0.2}, cubic_ratios(3));
  const auto rows = sweep_shape(q, {0.4, 0.6, 1.0, 1.0 / 0.6, 2.5});
  const auto& mid = rows[2];
  for (const auto& r : rows) {
    if (r.nx == 1.0) continue;
    c.expect(mid.delta_dyn > r.delta_dyn, fmt("Δ_dyn(1) <= Δ_dyn(%.2f)", r.nx));
    c.expect(mid.delta_alg < r.delta_alg, fmt("Δ_alg(1) >= Δ_alg(%.2f)", r.nx));
  }
  double asym = 0;
  for (auto [i, j] : {std::pair{0, 4}, std::pair{1, 3}}) {
    asym = std::max(asym, std::abs(rows[i].delta_alg - rows[j].delta_alg));
    asym = std::max(asym, std::abs(rows[i].delta_dyn - rows[j].delta_dyn));
  }
  c.expect(asym <= 2 * q.bisect_tol, fmt("asymmetry %.3g > %.3g", asym, 2 * q.bisect_tol));
  c.note(fmt("at n_x = 1: Δ_alg %.4f (min), Δ_dyn %.4f (max); asymmetry %.2g", mid.delta_alg, mid.delta_dyn, asym));
  return c.outcome();
}

// 7. Shape (1, 0.8, 1.25), means 0.2: AMP success drops at the SE Δ_alg,
// ALS never beats AMP.
Outcome amp_vs_als() {
  Checker c;
  const double alg = find_delta_alg(query({0.2, 0.2, 0.2}, {1.0, 0.8, 1.25}));
  ExperimentConfig cfg;
  cfg.dims = {200, 160, 250};
  cfg.priors = gaussians({0.2});
  cfg.algorithm = Algorithm::kCompare;
  cfg.deltas.clear();
  for (double f : {0.3, 0.5, 0.7, 0.85, 1.0, 1.15, 1.4, 1.8}) cfg.deltas.push_back(f * alg);
  cfg.seeds.clear();
  for (std::uint64_t s = 1; s <= 20; ++s) cfg.seeds.push_back(s);
  const CompareTable table = compare_amp_als(cfg);

  // Δ where the AMP success fraction crosses 1/2, by linear interpolation.
  double drop = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 1; k < table.rows.size(); ++k) {
    const auto &a = table.rows[k - 1], &b = table.rows[k];
    if (a.amp_success_rate >= 0.5 && b.amp_success_rate < 0.5) {
      const double t = (a.amp_success_rate - 0.5) / (a.amp_success_rate - b.amp_success_rate);
      drop = a.delta + t * (b.delta - a.delta);
      break;
    }
  }
  std::string rates;
  for (const auto& r : table.rows) {
    rates += fmt(" %.3f:%.2f/%.2f", r.delta, r.amp_success_rate, r.als_success_rate);
    if (r.delta >= alg / 2)
      c.expect(r.amp_success_rate >= r.als_success_rate, fmt("ALS beats AMP at Δ = %.4f", r.delta));
    c.expect(r.als_success_rate - r.amp_success_rate <= 0.1, fmt("ALS beats AMP by > 0.1 at Δ = %.4f", r.delta));
  }
  c.expect(std::isfinite(drop), "AMP success fraction never crosses 1/2;" + rates);
  if (std::isfinite(drop))
    c.expect(std::abs(drop - alg) <= 0.3 * alg, fmt("AMP drop at %.4f, SE Δ_alg %.4f", drop, alg));
  c.note(fmt("SE Δ_alg %.4f, AMP drop %.4f; Δ:amp/als", alg, drop) + rates);
  return c.outcome();
}

// 8. AMP against directed-message BP on an 8×8×8 instance.
Outcome bp_equivalence() {
  Checker c;
  const std::vector<PriorSpec> priors(3, PriorSpec::gaussian(1.0, 0.25));
  const double damping = 0.5;
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Instance inst = make_instance(make_shape({8, 8, 8}), priors, 1, 0.1, seed);
    AmpOptions opt;
    opt.damping = damping;
    opt.max_iter = 2000;
    opt.tol = 1e-9;
    const AmpResult amp = run_amp(inst.obs, priors, 1, {}, opt, seed);
    const AmpState start = init_state(inst.obs, priors, 1, {}, seed);
    const FactorSet bp = bp_reference_from(inst.obs, priors, start.xhat, BpOptions{2000, damping, true});
    const FactorSet aligned = align_components(amp.factors, bp, false).aligned;
    for (int m = 0; m < 3; ++m) worst = std::max(worst, (aligned.factor(m) - bp.factor(m)).cwiseAbs().maxCoeff());
  }
  c.expect(worst <= 0.15, fmt("max per-entry difference %.3f > 0.15", worst));
  c.note(fmt("max per-entry difference %.3f over 5 seeds", worst));
  return c.outcome();
}

// 9. Contractions against nested loops on every small shape.
Outcome contractions() {
  Checker c;
  double worst = 0;
  int cases = 0;
  for (const auto& dims : small_shape_grid()) {
    const TensorShape s = make_shape(dims);
    const DenseTensor y = random_tensor(s, 3);
    for (int r = 1; r <= 3; ++r) {
      const FactorSet f = random_factors(s, r, 5 + r);
      const DenseTensor w = low_rank_tensor(f);
      const auto ref = brute_low_rank(f);
      for (std::size_t k = 0; k < ref.size(); ++k) worst = std::max(worst, std::abs(w.values()[k] - ref[k]));
      for (int mode = 0; mode < s.order(); ++mode) {
        const RowMatrix expect = brute_mttkrp(y, f, mode);
        for (auto isa : {kernels::Isa::kScalar, kernels::Isa::kAuto})
          worst = std::max(worst, (mttkrp_exclude(y, f, mode, isa) - expect).cwiseAbs().maxCoeff());
      }
      ++cases;
    }
  }
  c.expect(worst <= 1e-12, fmt("max error %.3g > 1e-12", worst));
  c.note(fmt("max error %.2g over %d (shape, rank) cases", worst, cases));
  return c.outcome();
}

// 10. Nishimori identity for converged easy-regime AMP runs.
Outcome nishimori() {
  Checker c;
  const auto priors = gaussians({0.2, 0.2, 0.2});
  const std::size_t n = 200;
  const double bound = 5.0 / std::sqrt(static_cast<double>(n));
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance inst = make_instance(make_shape({n, n, n}), priors, 1, 0.08, seed);
    const AmpResult res = run_amp(inst.obs, priors, 1, {}, {}, seed, &inst.truth);
    c.expect(res.converged, fmt("seed %d did not converge", static_cast<int>(seed)));
    const OverlapSet self = self_overlap(res.factors), truth = overlap(res.factors, inst.truth);
    for (int a = 0; a < 3; ++a) worst = std::max(worst, std::abs(self.scalar(a) - truth.scalar(a)));
  }
  c.expect(worst <= bound, fmt("max |q - m| %.3f > %.3f", worst, bound));
  c.note(fmt("max |q - m| %.4f <= %.3f over 10 seeds", worst, bound));
  return c.outcome();
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tamp acceptance suite"};
  int only = 0;
  app.add_option("--only", only, "Run a single criterion (1-10)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {"prior posterior moments vs quadrature oracle", prior_oracle},
      {"closed-form Gaussian SE step vs generic quadrature", closed_form_se},
      {"zero-mean priors: uninformative point is stable", zero_mean},
      {"bistable window, AMP at N=200 tracks SE", bistable_window},
      {"means sweep with one zero mean", means_sweep},
      {"shape sweep: widest window at the cubic point", shape_sweep},
      {"AMP vs ALS success on shape (1, 0.8, 1.25)", amp_vs_als},
      {"AMP vs directed-message BP on 8x8x8", bp_equivalence},
      {"contractions vs nested loops", contractions},
      {"Nishimori identity in the easy regime", nishimori},
  };
  int passed = 0, ran = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (only != 0 && only != id) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[k].run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] A%d %s: %s (%.1f s)\n", out.pass ? "PASS" : "FAIL", id, criteria[k].name, out.detail.c_str(),
                secs);
    std::fflush(stdout);
    passed += out.pass;
    ++ran;
  }
  std::printf("acceptance: %d/%d passed\n", passed, ran);
  return passed == ran ? 0 : 1;
}
