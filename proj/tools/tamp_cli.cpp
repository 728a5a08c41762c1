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

// Command-line front end: synthetic data, AMP / ALS runs, state evolution,
// phase boundaries and the AMP-vs-ALS comparison.
//
// Exit status: 0 success, 1 configuration or I/O error, 2 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "tamp/als.hpp"
#include "tamp/amp.hpp"
#include "tamp/config.hpp"
#include "tamp/error.hpp"
#include "tamp/experiment.hpp"
#include "tamp/tensor_io.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;
using namespace tamp;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool deterministic = false;
  std::optional<int> threads;
  std::string tensor;  // amp / als only
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "Config file (sectioned key = value)")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "Run a single seed instead of the configured list");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_flag("--deterministic", f.deterministic, "Scalar kernels, no wall-clock fields");
  cmd->add_option("--threads", f.threads, "Worker threads")->check(CLI::NonNegativeNumber);
}

ExperimentConfig resolve(const CommonFlags& f, Algorithm algorithm) {
  ExperimentConfig c = f.config.empty() ? ExperimentConfig{} : load_config(f.config);
  c.algorithm = algorithm;
  if (f.seed) c.seeds = {*f.seed};
  if (!f.out.empty()) c.output = f.out;
  if (f.deterministic) c.deterministic = true;
  if (f.threads) c.threads = *f.threads;
  validate(c);
#ifdef _OPENMP
  if (c.threads > 0) omp_set_num_threads(c.threads);
#endif
  if (c.deterministic) kernels::set_default_isa(kernels::Isa::kScalar);
  return c;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
}

void echo_config(const ExperimentConfig& c) { write_text(fs::path(c.output) / "config.txt", to_text(c)); }

int report(const std::vector<RunRecord>& records) {
  int failed = 0;
  for (const auto& r : records)
    if (!r.ok()) ++failed;
  std::printf("%zu runs, %d failed\n", records.size(), failed);
  return 0;
}

int cmd_generate(const CommonFlags& f) {
  const ExperimentConfig c = resolve(f, Algorithm::kAmp);
  const fs::path out(c.output);
  const std::uint64_t seed = c.seeds.empty() ? 0 : c.seeds.front();
  const Instance inst = make_instance(make_shape(c.dims), c.mode_priors(), c.rank, c.deltas.front(), seed);
  fs::create_directories(out / "truth");
  io::write_tensor(out / "tensor.tamp", inst.obs.tensor, inst.obs.delta);
  io::write_factors(out / "truth", inst.truth);
  echo_config(c);
  std::printf("wrote %s\n", (out / "tensor.tamp").string().c_str());
  return 0;
}

/// Factorizes a tensor file; writes the estimated factors.
int run_on_file(const CommonFlags& f, Algorithm algorithm) {
  ExperimentConfig c = resolve(f, algorithm);
  const io::TensorFile file = io::read_tensor(f.tensor);
  const double delta = file.delta.value_or(c.deltas.front());
  const Observation obs = make_observation(file.tensor, delta);
  const std::uint64_t seed = c.seeds.empty() ? 0 : c.seeds.front();
  AmpResult result;
  if (algorithm == Algorithm::kAmp) {
    if (c.init == InitMode::kInformed) throw Error(ErrorCode::kConfig, "informed init needs a ground truth");
    AmpOptions o;
    o.damping = c.damping;
    o.tol = c.tol;
    o.max_iter = c.max_iter;
    o.scaling = c.scaling;
    std::vector<PriorSpec> priors = c.priors.size() == 1
                                        ? std::vector<PriorSpec>(obs.tensor.shape().order(), c.priors.front())
                                        : c.priors;
    result = run_amp(obs, priors, c.rank, InitSpec{}, o, seed);
  } else {
    AlsConfig a;
    a.rank = c.rank;
    a.ridge = c.ridge;
    a.tol = c.tol;
    a.max_iter = c.max_iter;
    a.seed = seed;
    result = run_als(obs, a);
  }
  const fs::path out(c.output);
  fs::create_directories(out);
  io::write_factors(out, result.factors);
  std::printf("%s: %d iterations, converged=%s\n", to_string(algorithm).c_str(), result.iterations,
              result.converged ? "true" : "false");
  return 0;
}

int cmd_batch(const CommonFlags& f, Algorithm algorithm) {
  if (!f.tensor.empty()) return run_on_file(f, algorithm);
  const ExperimentConfig c = resolve(f, algorithm);
  const auto records = run_experiment(c);
  const fs::path out(c.output);
  write_records(out / "records.jsonl", records);
  write_summary_csv(out / "summary.csv", records);
  echo_config(c);
  return report(records);
}

int cmd_se(const CommonFlags& f) {
  const ExperimentConfig c = resolve(f, Algorithm::kSe);
  const auto records = run_experiment(c);
  const fs::path out(c.output);
  write_records(out / "records.jsonl", records);
  write_se_csv(out / "se_curve.csv", records);
  echo_config(c);
  return report(records);
}

int cmd_phase(const CommonFlags& f) {
  const ExperimentConfig c = resolve(f, Algorithm::kPhase);
  const PhaseSummary s = run_phase(c);
  const fs::path out(c.output);
  {
    std::ostringstream text;
    text.precision(17);
    text << "delta_alg,delta_dyn\n";
    if (s.delta_alg) text << *s.delta_alg;
    text << ',';
    if (s.delta_dyn) text << *s.delta_dyn;
    text << '\n';
    write_text(out / "phase.csv", text.str());
  }
  if (!s.shape_rows.empty()) write_shape_csv(out / "phase_shape.csv", s.shape_rows);
  if (!s.means_rows.empty()) write_means_csv(out / "phase_means.csv", s.means_rows);
  echo_config(c);
  std::printf("delta_alg=%s delta_dyn=%s\n", s.delta_alg ? std::to_string(*s.delta_alg).c_str() : "none",
              s.delta_dyn ? std::to_string(*s.delta_dyn).c_str() : "none");
  return 0;
}

int cmd_compare(const CommonFlags& f) {
  const ExperimentConfig c = resolve(f, Algorithm::kCompare);
  const CompareTable t = compare_amp_als(c);
  const fs::path out(c.output);
  write_compare_csv(out / "compare.csv", t);
  write_records(out / "records.jsonl", t.records);
  write_summary_csv(out / "summary.csv", t.records);
  echo_config(c);
  return report(t.records);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tensor factorization by approximate message passing"};
  app.require_subcommand(1);
  CommonFlags flags;

  auto* generate = app.add_subcommand("generate", "Write a synthetic tensor and its ground-truth factors");
  auto* amp = app.add_subcommand("amp", "Run AMP (synthetic batch, or --tensor FILE)");
  auto* als = app.add_subcommand("als", "Run ALS (synthetic batch, or --tensor FILE)");
  auto* se = app.add_subcommand("se", "State-evolution MSE curve over the delta grid");
  auto* phase = app.add_subcommand("phase", "Phase boundaries and optional sweeps");
  auto* compare = app.add_subcommand("compare", "AMP vs ALS success rates over the delta grid");
  for (auto* cmd : {generate, amp, als, se, phase, compare}) add_common(cmd, flags);
  for (auto* cmd : {amp, als})
    cmd->add_option("--tensor", flags.tensor, "Factorize this tensor file")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (generate->parsed()) return cmd_generate(flags);
    if (amp->parsed()) return cmd_batch(flags, Algorithm::kAmp);
    if (als->parsed()) return cmd_batch(flags, Algorithm::kAls);
    if (se->parsed()) return cmd_se(flags);
    if (phase->parsed()) return cmd_phase(flags);
    if (compare->parsed()) return cmd_compare(flags);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.is_numerical() ? 2 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
