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

#include "tamp/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "tamp/alignment.hpp"
#include "tamp/als.hpp"
#include "tamp/amp.hpp"
#include "tamp/error.hpp"
#include "tamp/format.hpp"
#include "tamp/rng.hpp"
#include "tamp/state_evolution.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tamp {

using nlohmann::json;

namespace {

kernels::Isa isa_for(const ExperimentConfig& config) {
  return config.deterministic ? kernels::Isa::kScalar : kernels::Isa::kAuto;
}

RunRecord echo(const ExperimentConfig& config, Algorithm algorithm, double delta) {
  RunRecord r;
  r.algorithm = to_string(algorithm);
  r.init = algorithm == Algorithm::kAls ? "random" : to_string(config.init);
  r.dims = config.dims;
  r.rank = config.rank;
  for (const auto& p : config.mode_priors()) r.priors.push_back(p.to_string());
  r.delta = delta;
  r.damping = config.damping;
  r.tol = config.tol;
  r.max_iter = config.max_iter;
  r.scaling = to_string(config.scaling);
  return r;
}

/// Diagonal-averaged overlap MSE, any rank.
double se_mse(const OverlapSet& M, const std::vector<PriorSpec>& priors) {
  double total = 0.0;
  for (int a = 0; a < M.order(); ++a) {
    const auto& prior = priors[static_cast<std::size_t>(a)];
    const double var = prior.variance();
    const double m = M.M[static_cast<std::size_t>(a)].diagonal().mean();
    total += (prior.second_moment() - m) / (var > 0.0 ? var : 1.0);
  }
  return std::max(0.0, total / M.order());
}

std::vector<RunRecord> se_records(const ExperimentConfig& config) {
  const TensorShape shape = make_shape(config.dims);
  std::vector<RunRecord> out;
  for (double delta : config.deltas) {
    for (InitMode init : {InitMode::kInformed, InitMode::kUninformed}) {
      ExperimentConfig c = config;
      c.init = init;
      RunRecord rec = echo(c, Algorithm::kSe, delta);
      try {
        SeParams params;
        params.priors = config.mode_priors();
        params.ratios = shape.ratios();
        params.delta = delta;
        params.rank = config.rank;
        params.quad_nodes = config.quad_nodes;
        params.scaling = config.scaling;
        const SeRun run = se_fixed_point(se_init(params, init), params, config.se_tol, config.se_max_iter);
        rec.overlaps = run.fixed_point.M;
        rec.factor_mse = se_mse(run.fixed_point, params.priors);
        rec.iterations = run.iterations;
        rec.converged = run.converged;
      } catch (const std::exception& e) {
        rec.error = e.what();
      }
      out.push_back(std::move(rec));
    }
  }
  return out;
}

/// Runs body(k) for k in [0, n), in parallel when there is more than one
/// cell. Each call writes only its own slot, so the result is independent
/// of the worker count.
template <typename Body>
void for_cells(std::size_t n, Body body) {
#ifdef _OPENMP
  if (n > 1) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n); ++k) body(static_cast<std::size_t>(k));
    return;
  }
#endif
  for (std::size_t k = 0; k < n; ++k) body(k);
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto m = n ? static_cast<Eigen::Index>(rows.at(0).size()) : 0;
  Eigen::MatrixXd out(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows.at(i).size()) != m) throw Error(ErrorCode::kIo, "record: ragged overlap matrix");
    for (Eigen::Index j = 0; j < m; ++j) out(i, j) = rows.at(i).at(j).get<double>();
  }
  return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

}  // namespace

Instance make_instance(const TensorShape& shape, const std::vector<PriorSpec>& priors, int rank, double delta,
                       std::uint64_t seed) {
  if (priors.size() != static_cast<std::size_t>(shape.order()))
    throw Error(ErrorCode::kInvalidArgument, "make_instance: need one prior per mode");
  const std::uint64_t truth_seed = Rng::derive(seed, streams::kTruth);
  std::vector<RowMatrix> factors;
  for (int a = 0; a < shape.order(); ++a)
    factors.push_back(sample_prior(priors[static_cast<std::size_t>(a)], shape.dim(a), rank,
                                   Rng::derive(truth_seed, static_cast<std::uint64_t>(a))));
  FactorSet truth(shape, rank, std::move(factors));
  Observation obs = add_noise(low_rank_tensor(truth), delta, Rng::derive(seed, streams::kNoise));
  return {std::move(truth), std::move(obs)};
}

bool RunRecord::operator==(const RunRecord& o) const {
  if (overlaps.size() != o.overlaps.size()) return false;
  for (std::size_t k = 0; k < overlaps.size(); ++k)
    if (overlaps[k].rows() != o.overlaps[k].rows() || overlaps[k].cols() != o.overlaps[k].cols() ||
        overlaps[k] != o.overlaps[k])
      return false;
  return std::tie(algorithm, init, dims, rank, priors, delta, damping, tol, max_iter, scaling, seed, factor_mse,
                  tensor_mse, iterations, converged, wall_time_s, error) ==
         std::tie(o.algorithm, o.init, o.dims, o.rank, o.priors, o.delta, o.damping, o.tol, o.max_iter, o.scaling,
                  o.seed, o.factor_mse, o.tensor_mse, o.iterations, o.converged, o.wall_time_s, o.error);
}

std::string serialize(const RunRecord& r) {
  json j;
  j["algorithm"] = r.algorithm;
  j["init"] = r.init;
  j["dims"] = r.dims;
  j["rank"] = r.rank;
  j["priors"] = r.priors;
  j["delta"] = r.delta;
  j["damping"] = r.damping;
  j["tol"] = r.tol;
  j["max_iter"] = r.max_iter;
  j["scaling"] = r.scaling;
  j["seed"] = r.seed ? json(*r.seed) : json(nullptr);
  json overlaps = json::array();
  for (const auto& m : r.overlaps) overlaps.push_back(matrix_to_json(m));
  j["overlaps"] = std::move(overlaps);
  j["factor_mse"] = r.factor_mse ? json(*r.factor_mse) : json(nullptr);
  j["tensor_mse"] = r.tensor_mse ? json(*r.tensor_mse) : json(nullptr);
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["wall_time_s"] = r.wall_time_s;
  j["error"] = r.error;
  return j.dump();
}

RunRecord parse_record(const std::string& line) {
  try {
    const json j = json::parse(line);
    RunRecord r;
    r.algorithm = j.at("algorithm").get<std::string>();
    r.init = j.at("init").get<std::string>();
    r.dims = j.at("dims").get<std::vector<std::size_t>>();
    r.rank = j.at("rank").get<int>();
    r.priors = j.at("priors").get<std::vector<std::string>>();
    r.delta = j.at("delta").get<double>();
    r.damping = j.at("damping").get<double>();
    r.tol = j.at("tol").get<double>();
    r.max_iter = j.at("max_iter").get<int>();
    r.scaling = j.at("scaling").get<std::string>();
    if (!j.at("seed").is_null()) r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& m : j.at("overlaps")) r.overlaps.push_back(matrix_from_json(m));
    if (!j.at("factor_mse").is_null()) r.factor_mse = j.at("factor_mse").get<double>();
    if (!j.at("tensor_mse").is_null()) r.tensor_mse = j.at("tensor_mse").get<double>();
    r.iterations = j.at("iterations").get<int>();
    r.converged = j.at("converged").get<bool>();
    r.wall_time_s = j.at("wall_time_s").get<double>();
    r.error = j.at("error").get<std::string>();
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("record: ") + e.what());
  }
}

void write_records(const std::filesystem::path& path, const std::vector<RunRecord>& records) {
  auto out = open_out(path);
  for (const auto& r : records) out << serialize(r) << '\n';
}

std::vector<RunRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::vector<RunRecord> out;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(parse_record(line));
  return out;
}

RunRecord run_cell(const ExperimentConfig& config, Algorithm algorithm, double delta, std::uint64_t seed) {
  if (algorithm != Algorithm::kAmp && algorithm != Algorithm::kAls)
    throw Error(ErrorCode::kInvalidArgument, "run_cell: amp or als only");
  RunRecord rec = echo(config, algorithm, delta);
  rec.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    const auto priors = config.mode_priors();
    const Instance inst = make_instance(make_shape(config.dims), priors, config.rank, delta, seed);
    AmpResult result;
    if (algorithm == Algorithm::kAmp) {
      AmpOptions options;
      options.damping = config.damping;
      options.tol = config.tol;
      options.max_iter = config.max_iter;
      options.scaling = config.scaling;
      options.isa = isa_for(config);
      result = run_amp(inst.obs, priors, config.rank, InitSpec{config.init, 1.0}, options, seed, &inst.truth);
    } else {
      AlsConfig als;
      als.rank = config.rank;
      als.ridge = config.ridge;
      als.tol = config.tol;
      als.max_iter = config.max_iter;
      als.seed = seed;
      als.isa = isa_for(config);
      result = run_als(inst.obs, als, &inst.truth);
    }
    // AMP estimates carry no gauge freedom (the priors fix the scale), so
    // only ALS gets scale balancing.
    const Alignment aligned = align_components(result.factors, inst.truth, algorithm == Algorithm::kAls);
    rec.overlaps = aligned.overlaps.M;
    rec.factor_mse = factor_mse(aligned.aligned, inst.truth, priors);
    rec.tensor_mse = tensor_mse(result.factors, inst.truth);
    rec.iterations = result.iterations;
    rec.converged = result.converged;
    if (!std::isfinite(*rec.factor_mse) || !std::isfinite(*rec.tensor_mse))
      throw Error(ErrorCode::kDiverged, "non-finite error metric");
  } catch (const std::exception& e) {
    rec.overlaps.clear();
    rec.factor_mse.reset();
    rec.tensor_mse.reset();
    rec.error = e.what();
  }
  if (!config.deterministic)
    rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& config) {
  validate(config);
  switch (config.algorithm) {
    case Algorithm::kSe: return se_records(config);
    case Algorithm::kPhase: throw Error(ErrorCode::kConfig, "phase runs produce boundaries, not records");
    default: break;
  }
  std::vector<Algorithm> algorithms;
  if (config.algorithm == Algorithm::kCompare)
    algorithms = {Algorithm::kAmp, Algorithm::kAls};
  else
    algorithms = {config.algorithm};

  struct Cell {
    Algorithm algorithm;
    double delta;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (double delta : config.deltas)
    for (Algorithm a : algorithms)
      for (std::uint64_t seed : config.seeds) cells.push_back({a, delta, seed});
  std::vector<RunRecord> records(cells.size());
  for_cells(cells.size(), [&](std::size_t k) {
    records[k] = run_cell(config, cells[k].algorithm, cells[k].delta, cells[k].seed);
  });
  return records;
}

PhaseQuery phase_query(const ExperimentConfig& config) {
  PhaseQuery q;
  q.priors = config.mode_priors();
  q.ratios = make_shape(config.dims).ratios();
  q.lo = config.lo;
  q.hi = config.hi;
  q.mse_threshold = config.mse_threshold;
  q.bisect_tol = config.bisect_tol;
  q.quad_nodes = config.quad_nodes;
  q.se_tol = config.se_tol;
  q.se_max_iter = config.se_max_iter;
  q.scaling = config.scaling;
  return q;
}

CompareTable compare_amp_als(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.algorithm = Algorithm::kCompare;
  CompareTable table;
  table.records = run_experiment(c);
  if (config.rank == 1) {
    try {
      table.delta_alg = find_delta_alg(phase_query(config));
    } catch (const Error&) {
      table.delta_alg.reset();
    }
  }
  for (double delta : config.deltas) {
    CompareRow row;
    row.delta = delta;
    int n_amp = 0, n_als = 0, ok_amp = 0, ok_als = 0;
    int hit_amp = 0, hit_als = 0;
    double sum_amp = 0.0, sum_als = 0.0;
    for (const auto& r : table.records) {
      if (r.delta != delta) continue;
      const bool is_amp = r.algorithm == "amp";
      (is_amp ? n_amp : n_als) += 1;
      if (!r.ok()) continue;
      (is_amp ? ok_amp : ok_als) += 1;
      (is_amp ? sum_amp : sum_als) += *r.factor_mse;
      if (*r.factor_mse < config.success_threshold) (is_amp ? hit_amp : hit_als) += 1;
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.amp_success_rate = n_amp ? static_cast<double>(hit_amp) / n_amp : nan;
    row.als_success_rate = n_als ? static_cast<double>(hit_als) / n_als : nan;
    row.amp_mean_mse = ok_amp ? sum_amp / ok_amp : nan;
    row.als_mean_mse = ok_als ? sum_als / ok_als : nan;
    table.rows.push_back(row);
  }
  return table;
}

PhaseSummary run_phase(const ExperimentConfig& config) {
  validate(config);
  if (config.rank != 1) throw Error(ErrorCode::kConfig, "phase boundaries are rank-1 only");
  const PhaseQuery q = phase_query(config);
  PhaseSummary out;
  try {
    out.delta_alg = find_delta_alg(q);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kBracket) throw;
  }
  try {
    out.delta_dyn = find_delta_dyn(q);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kBracket) throw;
  }
  if (!config.nx_grid.empty()) out.shape_rows = sweep_shape(q, config.nx_grid);
  if (!config.mu1_grid.empty() || !config.mu2_grid.empty()) {
    if (config.mu1_grid.empty() || config.mu2_grid.empty())
      throw Error(ErrorCode::kConfig, "mu1_grid and mu2_grid must be given together");
    out.means_rows = sweep_means(q, config.mu1_grid, config.mu2_grid);
  }
  return out;
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<RunRecord>& records) {
  struct Acc {
    int runs = 0, failed = 0, converged = 0;
    double factor = 0.0, tensor = 0.0;
    int tensor_n = 0;
  };
  std::map<std::tuple<std::string, std::string, double>, Acc> groups;
  for (const auto& r : records) {
    Acc& a = groups[{r.algorithm, r.init, r.delta}];
    ++a.runs;
    if (!r.ok()) {
      ++a.failed;
      continue;
    }
    a.converged += r.converged ? 1 : 0;
    a.factor += r.factor_mse.value_or(0.0);
    if (r.tensor_mse) {
      a.tensor += *r.tensor_mse;
      ++a.tensor_n;
    }
  }
  auto out = open_out(path);
  out << "algorithm,init,delta,runs,failed,converged,mean_factor_mse,mean_tensor_mse\n";
  for (const auto& [key, a] : groups) {
    const int ok = a.runs - a.failed;
    out << std::get<0>(key) << ',' << std::get<1>(key) << ',' << format_double(std::get<2>(key)) << ',' << a.runs << ','
        << a.failed << ',' << a.converged << ',';
    if (ok) out << format_double(a.factor / ok);
    out << ',';
    if (a.tensor_n) out << format_double(a.tensor / a.tensor_n);
    out << '\n';
  }
}

void write_compare_csv(const std::filesystem::path& path, const CompareTable& table) {
  auto out = open_out(path);
  out << "# delta_alg=";
  if (table.delta_alg) out << format_double(*table.delta_alg);
  out << '\n';
  out << "delta,amp_success_rate,als_success_rate,amp_mean_mse,als_mean_mse\n";
  for (const auto& r : table.rows)
    out << format_double(r.delta) << ',' << format_double(r.amp_success_rate) << ','
        << format_double(r.als_success_rate) << ',' << format_double(r.amp_mean_mse) << ','
        << format_double(r.als_mean_mse) << '\n';
}

void write_se_csv(const std::filesystem::path& path, const std::vector<RunRecord>& records) {
  std::map<double, std::pair<std::optional<double>, std::optional<double>>> rows;
  for (const auto& r : records) {
    if (r.algorithm != "se") continue;
    auto& row = rows[r.delta];
    (r.init == "informed" ? row.first : row.second) = r.factor_mse;
  }
  auto out = open_out(path);
  out << "delta,mse_informed,mse_uninformed\n";
  for (const auto& [delta, row] : rows) {
    out << format_double(delta) << ',';
    if (row.first) out << format_double(*row.first);
    out << ',';
    if (row.second) out << format_double(*row.second);
    out << '\n';
  }
}

}  // namespace tamp
