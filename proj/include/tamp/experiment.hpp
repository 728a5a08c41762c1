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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tamp/config.hpp"
#include "tamp/phase_diagram.hpp"
#include "tamp/tensor.hpp"

namespace tamp {

/// Ground truth plus its noisy observation for one seed.
struct Instance {
  FactorSet truth;
  Observation obs;
};

/// Truth rows drawn from the priors on stream derive(seed, kTruth), noise on
/// derive(seed, kNoise).
Instance make_instance(const TensorShape& shape, const std::vector<PriorSpec>& priors, int rank, double delta,
                       std::uint64_t seed);

struct RunRecord {
  // config echo
  std::string algorithm;
  std::string init;
  std::vector<std::size_t> dims;
  int rank = 1;
  std::vector<std::string> priors;
  double delta = 0.0;
  double damping = 0.0;
  double tol = 0.0;
  int max_iter = 0;
  std::string scaling;
  std::optional<std::uint64_t> seed;  ///< absent for state-evolution rows
  // results
  std::vector<Eigen::MatrixXd> overlaps;  ///< per mode, r × r, after alignment
  std::optional<double> factor_mse;
  std::optional<double> tensor_mse;  ///< absent for state-evolution rows
  int iterations = 0;
  bool converged = false;
  double wall_time_s = 0.0;  ///< 0 under the deterministic flag
  std::string error;        ///< non-empty when the run failed

  bool ok() const { return error.empty(); }
  bool operator==(const RunRecord& other) const;
};

/// One JSON object, no trailing newline. Doubles keep full precision.
std::string serialize(const RunRecord& record);
/// Throws Error(kIo) on malformed input.
RunRecord parse_record(const std::string& line);

void write_records(const std::filesystem::path& path, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_records(const std::filesystem::path& path);

/// One (algorithm, Δ, seed) cell: synthesize, run, align, score. Module
/// errors end up in record.error instead of propagating.
RunRecord run_cell(const ExperimentConfig& config, Algorithm algorithm, double delta, std::uint64_t seed);

/// amp / als: one record per (Δ, seed); compare: amp and als records for
/// every cell; se: one record per (Δ, init) without tensor generation.
/// Throws Error(kConfig) for algorithm = phase.
std::vector<RunRecord> run_experiment(const ExperimentConfig& config);

struct CompareRow {
  double delta = 0.0;
  double amp_success_rate = 0.0;
  double als_success_rate = 0.0;
  double amp_mean_mse = 0.0;
  double als_mean_mse = 0.0;
};

struct CompareTable {
  std::vector<CompareRow> rows;
  std::optional<double> delta_alg;  ///< from state evolution (rank 1 only)
  std::vector<RunRecord> records;
};

/// Success means a finished run with aligned factor MSE below
/// config.success_threshold; failed runs count as unsuccessful and are
/// left out of the MSE means.
CompareTable compare_amp_als(const ExperimentConfig& config);

struct PhaseSummary {
  std::optional<double> delta_alg;
  std::optional<double> delta_dyn;
  std::vector<ShapeRow> shape_rows;
  std::vector<MeansRow> means_rows;
};

PhaseQuery phase_query(const ExperimentConfig& config);
PhaseSummary run_phase(const ExperimentConfig& config);

/// Mean metrics per (algorithm, init, Δ).
void write_summary_csv(const std::filesystem::path& path, const std::vector<RunRecord>& records);
void write_compare_csv(const std::filesystem::path& path, const CompareTable& table);
/// Informed and uninformed state-evolution MSE per Δ.
void write_se_csv(const std::filesystem::path& path, const std::vector<RunRecord>& records);

}  // namespace tamp
