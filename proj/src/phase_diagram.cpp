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

#include "tamp/phase_diagram.hpp"

#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <variant>

#include "tamp/error.hpp"

namespace tamp {

void validate(const PhaseQuery& query) {
  if (!(query.lo > 0.0 && query.lo < query.hi))
    throw Error(ErrorCode::kInvalidParameter, "bracket must satisfy 0 < lo < hi");
  if (!(query.mse_threshold > 0.0 && query.mse_threshold < 1.0))
    throw Error(ErrorCode::kInvalidParameter, "mse_threshold must lie in (0, 1)");
  if (!(query.bisect_tol > 0.0)) throw Error(ErrorCode::kInvalidParameter, "bisect_tol must be positive");
  if (query.priors.size() != query.ratios.size())
    throw Error(ErrorCode::kInvalidArgument, "need one prior per mode");
}

SeParams se_params(const PhaseQuery& query, double delta) {
  SeParams params;
  params.priors = query.priors;
  params.ratios = query.ratios;
  params.delta = delta;
  params.rank = 1;
  params.quad_nodes = query.quad_nodes;
  params.scaling = query.scaling;
  return params;
}

double fixed_point_mse(const PhaseQuery& query, double delta, InitMode init) {
  if (!(delta > 0.0)) throw Error(ErrorCode::kInvalidParameter, "delta must be positive");
  const SeParams params = se_params(query, delta);
  const SeRun run = se_fixed_point(se_init(params, init), params, query.se_tol, query.se_max_iter);
  if (!run.converged)
    throw Error(ErrorCode::kIndeterminate, "state evolution did not converge at delta = " + std::to_string(delta));
  return mse_from_overlap(run.fixed_point, query.priors);
}

MseClass classify_delta(const PhaseQuery& query, double delta, InitMode init) {
  return fixed_point_mse(query, delta, init) < query.mse_threshold ? MseClass::kLow : MseClass::kHigh;
}

namespace {

// Boundary between low (below) and high (above) for the given start.
double bisect(const PhaseQuery& query, InitMode init, double lo, double hi) {
  while (hi - lo > query.bisect_tol) {
    const double mid = 0.5 * (lo + hi);
    if (classify_delta(query, mid, init) == MseClass::kLow)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Runs body(k) for k in [0, count) in parallel; the first exception is
// rethrown after the loop.
template <class Body>
void parallel_for(std::ptrdiff_t count, Body body) {
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    try {
      body(static_cast<std::size_t>(k));
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

double find_delta_alg(const PhaseQuery& query) {
  validate(query);
  if (classify_delta(query, query.lo, InitMode::kUninformed) == MseClass::kHigh) return 0.0;
  if (classify_delta(query, query.hi, InitMode::kUninformed) == MseClass::kLow)
    throw Error(ErrorCode::kBracket, "uninformed start is low-MSE at both bracket ends");
  return bisect(query, InitMode::kUninformed, query.lo, query.hi);
}

double find_delta_dyn(const PhaseQuery& query) {
  validate(query);
  if (classify_delta(query, query.lo, InitMode::kInformed) == MseClass::kHigh)
    throw Error(ErrorCode::kBracket, "informed start is high-MSE at both bracket ends");
  if (classify_delta(query, query.hi, InitMode::kInformed) == MseClass::kLow)
    throw Error(ErrorCode::kBracket, "informed start is low-MSE at both bracket ends");
  return bisect(query, InitMode::kInformed, query.lo, query.hi);
}

std::vector<ShapeRow> sweep_shape(const PhaseQuery& query, const std::vector<double>& nx_grid) {
  if (query.priors.size() != 3) throw Error(ErrorCode::kInvalidArgument, "shape sweep needs order 3");
  std::vector<ShapeRow> rows(nx_grid.size());
  parallel_for(static_cast<std::ptrdiff_t>(nx_grid.size()), [&](std::size_t k) {
    const double nx = nx_grid[k];
    if (!(nx > 0.0)) throw Error(ErrorCode::kInvalidParameter, "n_x must be positive");
    PhaseQuery q = query;
    q.ratios = {1.0, nx, 1.0 / nx};
    rows[k] = ShapeRow{nx, find_delta_alg(q), find_delta_dyn(q)};
  });
  return rows;
}

std::vector<MeansRow> sweep_means(const PhaseQuery& query, const std::vector<double>& mu1_grid,
                                  const std::vector<double>& mu2_grid) {
  if (query.priors.size() != 3) throw Error(ErrorCode::kInvalidArgument, "means sweep needs order 3");
  std::vector<double> sigma2;
  for (const PriorSpec& p : query.priors) {
    const auto* g = std::get_if<GaussianPrior>(&p.value());
    if (g == nullptr) throw Error(ErrorCode::kUnsupported, "means sweep needs Gaussian priors");
    sigma2.push_back(g->sigma2);
  }
  std::vector<MeansRow> rows(mu1_grid.size() * mu2_grid.size());
  parallel_for(static_cast<std::ptrdiff_t>(rows.size()), [&](std::size_t k) {
    const double mu1 = mu1_grid[k / mu2_grid.size()];
    const double mu2 = mu2_grid[k % mu2_grid.size()];
    PhaseQuery q = query;
    q.priors = {PriorSpec::gaussian(mu1, sigma2[0]), PriorSpec::gaussian(mu2, sigma2[1]),
                PriorSpec::gaussian(0.0, sigma2[2])};
    const int zero_means = 1 + (mu1 == 0.0) + (mu2 == 0.0);
    const double alg = zero_means >= 2 ? 0.0 : find_delta_alg(q);
    rows[k] = MeansRow{mu1, mu2, alg, find_delta_dyn(q)};
  });
  return rows;
}

void write_shape_csv(const std::filesystem::path& path, const std::vector<ShapeRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  out << std::setprecision(10) << "nx,delta_alg,delta_dyn\n";
  for (const ShapeRow& r : rows) out << r.nx << ',' << r.delta_alg << ',' << r.delta_dyn << '\n';
}

void write_means_csv(const std::filesystem::path& path, const std::vector<MeansRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  out << std::setprecision(10) << "mu1,mu2,delta_alg,delta_dyn\n";
  for (const MeansRow& r : rows) out << r.mu1 << ',' << r.mu2 << ',' << r.delta_alg << ',' << r.delta_dyn << '\n';
}

}  // namespace tamp
