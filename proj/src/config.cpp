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

#include "tamp/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "tamp/error.hpp"
#include "tamp/format.hpp"

namespace tamp {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::kConfig, "config: " + what); }

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    fail("not a number: '" + s + "'");
  }
  if (used != s.size()) fail("not a number: '" + s + "'");
  return v;
}

long long parse_int(const std::string& s) {
  long long v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) fail("not an integer: '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) fail("not a seed: '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  fail("not a boolean: '" + s + "'");
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split(s, ',')) out.push_back(parse_double(item));
  return out;
}

/// "a:b:n" expands to n evenly spaced points; otherwise a comma list.
std::vector<double> parse_grid(const std::string& s) {
  if (s.find(':') == std::string::npos) return parse_doubles(s);
  const auto parts = split(s, ':');
  if (parts.size() != 3) fail("grid must be lo:hi:count, got '" + s + "'");
  const double lo = parse_double(parts[0]), hi = parse_double(parts[1]);
  const long long n = parse_int(parts[2]);
  if (n < 1) fail("grid count must be positive");
  std::vector<double> out;
  for (long long k = 0; k < n; ++k) out.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / (n - 1));
  return out;
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "amp") return Algorithm::kAmp;
  if (s == "als") return Algorithm::kAls;
  if (s == "se") return Algorithm::kSe;
  if (s == "phase") return Algorithm::kPhase;
  if (s == "compare") return Algorithm::kCompare;
  fail("unknown algorithm '" + s + "'");
}

InitMode parse_init(const std::string& s) {
  if (s == "informed") return InitMode::kInformed;
  if (s == "uninformed") return InitMode::kUninformed;
  fail("unknown init '" + s + "'");
}

NoncubicScaling parse_scaling(const std::string& s) {
  if (s == "literal") return NoncubicScaling::kLiteral;
  if (s == "consistent") return NoncubicScaling::kConsistent;
  fail("unknown scaling '" + s + "'");
}

std::vector<PriorSpec> parse_priors(const std::string& s) {
  std::vector<PriorSpec> out;
  for (const auto& item : split(s, ';')) out.push_back(PriorSpec::parse(item));
  if (out.empty()) fail("priors must not be empty");
  return out;
}

std::string fmt(double v) { return format_double(v); }
template <typename T, typename = std::enable_if_t<std::is_integral_v<T>>>
std::string fmt(T v) {
  return std::to_string(v);
}
std::string fmt(const std::string& v) { return v; }

template <typename T>
std::string join(const std::vector<T>& values, const char* sep = ", ") {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) out += (k ? sep : "") + fmt(values[k]);
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"problem.dims",
       [](ExperimentConfig& c, const std::string& v) {
         c.dims.clear();
         for (const auto& item : split(v, ',')) {
           const long long d = parse_int(item);
           if (d <= 0) fail("dims must be positive");
           c.dims.push_back(static_cast<std::size_t>(d));
         }
       }},
      {"problem.rank", [](ExperimentConfig& c, const std::string& v) { c.rank = static_cast<int>(parse_int(v)); }},
      {"problem.priors", [](ExperimentConfig& c, const std::string& v) { c.priors = parse_priors(v); }},
      {"problem.delta", [](ExperimentConfig& c, const std::string& v) { c.deltas = {parse_double(v)}; }},
      {"problem.deltas", [](ExperimentConfig& c, const std::string& v) { c.deltas = parse_grid(v); }},
      {"algorithm.name", [](ExperimentConfig& c, const std::string& v) { c.algorithm = parse_algorithm(v); }},
      {"algorithm.init", [](ExperimentConfig& c, const std::string& v) { c.init = parse_init(v); }},
      {"algorithm.damping", [](ExperimentConfig& c, const std::string& v) { c.damping = parse_double(v); }},
      {"algorithm.tol", [](ExperimentConfig& c, const std::string& v) { c.tol = parse_double(v); }},
      {"algorithm.max_iter",
       [](ExperimentConfig& c, const std::string& v) { c.max_iter = static_cast<int>(parse_int(v)); }},
      {"algorithm.scaling", [](ExperimentConfig& c, const std::string& v) { c.scaling = parse_scaling(v); }},
      {"algorithm.ridge", [](ExperimentConfig& c, const std::string& v) { c.ridge = parse_double(v); }},
      {"run.seeds",
       [](ExperimentConfig& c, const std::string& v) {
         c.seeds.clear();
         for (const auto& item : split(v, ',')) {
           const auto dash = item.find('-');
           if (dash == std::string::npos) {
             c.seeds.push_back(parse_u64(item));
             continue;
           }
           const std::uint64_t a = parse_u64(trim(item.substr(0, dash)));
           const std::uint64_t b = parse_u64(trim(item.substr(dash + 1)));
           if (b < a) fail("seed range must be increasing: '" + item + "'");
           for (std::uint64_t s = a; s <= b; ++s) c.seeds.push_back(s);
         }
       }},
      {"run.output", [](ExperimentConfig& c, const std::string& v) { c.output = v; }},
      {"run.deterministic", [](ExperimentConfig& c, const std::string& v) { c.deterministic = parse_bool(v); }},
      {"run.threads", [](ExperimentConfig& c, const std::string& v) { c.threads = static_cast<int>(parse_int(v)); }},
      {"phase.lo", [](ExperimentConfig& c, const std::string& v) { c.lo = parse_double(v); }},
      {"phase.hi", [](ExperimentConfig& c, const std::string& v) { c.hi = parse_double(v); }},
      {"phase.mse_threshold", [](ExperimentConfig& c, const std::string& v) { c.mse_threshold = parse_double(v); }},
      {"phase.bisect_tol", [](ExperimentConfig& c, const std::string& v) { c.bisect_tol = parse_double(v); }},
      {"phase.quad_nodes",
       [](ExperimentConfig& c, const std::string& v) { c.quad_nodes = static_cast<int>(parse_int(v)); }},
      {"phase.se_tol", [](ExperimentConfig& c, const std::string& v) { c.se_tol = parse_double(v); }},
      {"phase.se_max_iter",
       [](ExperimentConfig& c, const std::string& v) { c.se_max_iter = static_cast<int>(parse_int(v)); }},
      {"phase.nx_grid", [](ExperimentConfig& c, const std::string& v) { c.nx_grid = parse_grid(v); }},
      {"phase.mu1_grid", [](ExperimentConfig& c, const std::string& v) { c.mu1_grid = parse_grid(v); }},
      {"phase.mu2_grid", [](ExperimentConfig& c, const std::string& v) { c.mu2_grid = parse_grid(v); }},
      {"compare.success_threshold",
       [](ExperimentConfig& c, const std::string& v) { c.success_threshold = parse_double(v); }},
  };
  return table;
}

}  // namespace

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kAmp: return "amp";
    case Algorithm::kAls: return "als";
    case Algorithm::kSe: return "se";
    case Algorithm::kPhase: return "phase";
    case Algorithm::kCompare: return "compare";
  }
  return "?";
}

std::string to_string(InitMode init) { return init == InitMode::kInformed ? "informed" : "uninformed"; }

std::string to_string(NoncubicScaling scaling) {
  return scaling == NoncubicScaling::kLiteral ? "literal" : "consistent";
}

std::vector<PriorSpec> ExperimentConfig::mode_priors() const {
  if (priors.size() == 1) return std::vector<PriorSpec>(dims.size(), priors.front());
  return priors;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') fail(where + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      static const char* known[] = {"problem", "algorithm", "run", "phase", "compare"};
      if (std::find(std::begin(known), std::end(known), section) == std::end(known))
        fail(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(where + "expected key = value");
    if (section.empty()) fail(where + "key outside a section");
    const std::string key = section + "." + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) fail(where + "unknown key '" + key + "'");
    try {
      it->second(config, value);
    } catch (const Error& e) {
      fail(where + e.what());
    }
  }
  validate(config);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void validate(const ExperimentConfig& c) {
  if (c.dims.size() < 2) fail("dims needs at least two modes");
  if (c.rank < 1) fail("rank must be >= 1");
  if (c.priors.size() != 1 && c.priors.size() != c.dims.size()) fail("give one prior or one per mode");
  if (c.deltas.empty()) fail("delta grid must not be empty");
  for (double d : c.deltas)
    if (!(d > 0.0)) fail("delta must be positive");
  if (!(c.damping >= 0.0 && c.damping < 1.0)) fail("damping must be in [0, 1)");
  if (!(c.tol > 0.0)) fail("tol must be positive");
  if (c.max_iter < 1) fail("max_iter must be >= 1");
  if (!(c.ridge >= 0.0)) fail("ridge must be >= 0");
  if (c.threads < 0) fail("threads must be >= 0");
  if (!(c.lo > 0.0 && c.lo < c.hi)) fail("phase bracket needs 0 < lo < hi");
  if (!(c.mse_threshold > 0.0 && c.mse_threshold < 1.0)) fail("mse_threshold must be in (0, 1)");
  if (!(c.bisect_tol > 0.0)) fail("bisect_tol must be positive");
  if (c.quad_nodes < 3) fail("quad_nodes must be >= 3");
  if (!(c.se_tol > 0.0)) fail("se_tol must be positive");
  if (c.se_max_iter < 1) fail("se_max_iter must be >= 1");
  for (double nx : c.nx_grid)
    if (!(nx > 0.0)) fail("nx_grid entries must be positive");
  if (!(c.success_threshold > 0.0)) fail("success_threshold must be positive");
}

std::string to_text(const ExperimentConfig& c) {
  std::vector<std::string> priors;
  for (const auto& p : c.priors) priors.push_back(p.to_string());
  std::ostringstream os;
  os << "[problem]\n"
     << "dims = " << join(c.dims) << "\n"
     << "rank = " << c.rank << "\n"
     << "priors = " << join(priors, "; ") << "\n"
     << "deltas = " << join(c.deltas) << "\n"
     << "\n[algorithm]\n"
     << "name = " << to_string(c.algorithm) << "\n"
     << "init = " << to_string(c.init) << "\n"
     << "damping = " << fmt(c.damping) << "\n"
     << "tol = " << fmt(c.tol) << "\n"
     << "max_iter = " << c.max_iter << "\n"
     << "scaling = " << to_string(c.scaling) << "\n"
     << "ridge = " << fmt(c.ridge) << "\n"
     << "\n[run]\n"
     << "seeds = " << join(c.seeds) << "\n"
     << "output = " << c.output << "\n"
     << "deterministic = " << (c.deterministic ? "true" : "false") << "\n"
     << "threads = " << c.threads << "\n"
     << "\n[phase]\n"
     << "lo = " << fmt(c.lo) << "\n"
     << "hi = " << fmt(c.hi) << "\n"
     << "mse_threshold = " << fmt(c.mse_threshold) << "\n"
     << "bisect_tol = " << fmt(c.bisect_tol) << "\n"
     << "quad_nodes = " << c.quad_nodes << "\n"
     << "se_tol = " << fmt(c.se_tol) << "\n"
     << "se_max_iter = " << c.se_max_iter << "\n"
     << "nx_grid = " << join(c.nx_grid) << "\n"
     << "mu1_grid = " << join(c.mu1_grid) << "\n"
     << "mu2_grid = " << join(c.mu2_grid) << "\n"
     << "\n[compare]\n"
     << "success_threshold = " << fmt(c.success_threshold) << "\n";
  return os.str();
}

}  // namespace tamp
