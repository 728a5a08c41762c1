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
#include <string>
#include <vector>

#include "tamp/amp.hpp"
#include "tamp/priors.hpp"

namespace tamp {

enum class Algorithm { kAmp, kAls, kSe, kPhase, kCompare };

std::string to_string(Algorithm algorithm);
std::string to_string(InitMode init);
std::string to_string(NoncubicScaling scaling);

/// Everything a batch needs. Parsed from a sectioned key = value file;
/// the schema is documented in README.md.
struct ExperimentConfig {
  // [problem]
  std::vector<std::size_t> dims{200, 200, 200};
  int rank = 1;
  std::vector<PriorSpec> priors{PriorSpec::gaussian(0.2, 1.0)};
  std::vector<double> deltas{0.5};
  // [algorithm]
  Algorithm algorithm = Algorithm::kAmp;
  InitMode init = InitMode::kUninformed;
  double damping = 0.3;
  double tol = 1e-8;
  int max_iter = 500;
  NoncubicScaling scaling = NoncubicScaling::kLiteral;
  double ridge = 1e-10;
  // [run]
  std::vector<std::uint64_t> seeds{1};
  std::string output = "out";
  bool deterministic = false;
  int threads = 0;  ///< 0 = library default
  // [phase]
  double lo = 1e-4;
  double hi = 10.0;
  double mse_threshold = 0.5;
  double bisect_tol = 1e-4;
  int quad_nodes = 41;
  double se_tol = 1e-10;
  int se_max_iter = 10000;
  std::vector<double> nx_grid;
  std::vector<double> mu1_grid;
  std::vector<double> mu2_grid;
  // [compare]
  double success_threshold = 0.5;

  int order() const { return static_cast<int>(dims.size()); }
  /// One prior per mode; a single listed prior is used for every mode.
  std::vector<PriorSpec> mode_priors() const;
};

/// Parses config text. Unknown sections or keys, malformed values and
/// failed validation throw Error(kConfig) naming the line.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Throws Error(kConfig) when a parameter is outside its module's domain.
void validate(const ExperimentConfig& config);

/// Full config, defaults included, in the same format parse_config reads.
std::string to_text(const ExperimentConfig& config);

}  // namespace tamp
