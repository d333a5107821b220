// Copyright 2026 The fbfvi Authors
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

// Experiment runner: config parsing, problem construction, solver runs and
// CSV output (traces, summaries, o/d gap reports).

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fbfvi/operators.hpp"
#include "fbfvi/solvers.hpp"

namespace fbfvi::harness {

struct NetworkFiles {
  std::string nodes;
  std::string links;
  std::string od;
  std::string paths;

  friend bool operator==(const NetworkFiles&, const NetworkFiles&) = default;
};

struct ProblemSpec {
  std::string kind = "builtin";  // builtin | network
  std::string name;              // builtin problem name
  std::size_t dim = 2;
  std::uint64_t seed = 0;
  bool random = false;
  std::optional<double> lower;
  std::optional<double> upper;
  double radius = 1.0;

  // network problems
  std::string fixture;
  std::optional<NetworkFiles> files;
  std::string delay = "affine";  // affine | point_queue
  double bandwidth = 0.25;
  std::string time_profile = "exponential";  // exponential | gaussian
  std::size_t substeps = 4;
  double penalty_coefficient = 1.0;
  int penalty_exponent = 2;
  bool nonneg = true;

  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

struct GridSpec {
  double t0 = 0.0;
  double t1 = 2.0;
  std::size_t bins = 12;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct SolverSpec {
  std::string name;
  std::string method = "fbf";  // fbf | tseng | extragradient | projected_gradient
  std::string step = "adaptive";  // constant | adaptive (fbf, tseng)
  std::optional<double> gamma;
  double gamma0 = 1.0;
  double rho = 0.5;
  ScheduleParams schedule;
  double tol = 1e-4;
  std::size_t kmax = 10000;
  std::uint64_t seed = 0;
  std::string start;  // zero | uniform | random | feasible; empty = default

  friend bool operator==(const SolverSpec&, const SolverSpec&) = default;
};

struct OutputSpec {
  std::string dir = "out";
  bool timing = false;  // wall-clock column in traces (breaks byte-identity)
  std::vector<double> gap_edges = {0.0, 0.1, 0.2, 0.3};
  double support_threshold = 1e-6;  // relative to max flow

  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct ExperimentConfig {
  ProblemSpec problem;
  GridSpec grid;
  std::vector<SolverSpec> solvers;
  OutputSpec output;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// YAML mapping with keys problem, grid, solvers (a list, each entry with a
// name) and output. Unknown or repeated keys are errors carrying the line
// number; invalid values are errors naming the field.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string serialize(const ExperimentConfig& config);
// Semantic checks (also run by parse_config).
void validate(const ExperimentConfig& config);

struct SolverSummary {
  std::string name;
  std::string method;
  SolveStatus status = SolveStatus::MaxIters;
  std::string message;
  std::size_t iterations = 0;
  std::size_t evals = 0;
  std::size_t projections = 0;
  double final_eps = 0.0;
  double final_residual = 0.0;
  std::optional<double> dist_to_known;
  double wall_ms = 0.0;
  std::filesystem::path trace_path;
  // DUE runs only.
  std::vector<std::optional<double>> od_gaps;
  std::vector<std::size_t> gap_histogram;
  std::optional<double> support_violation;
};

struct RunReport {
  std::filesystem::path output_dir;
  std::vector<SolverSummary> solvers;

  bool all_converged() const;
  // 0 when every solver converged, 2 otherwise.
  int exit_code() const;
};

// Environment variable that, when set, re-roots relative output directories.
inline constexpr const char* kOutputRootEnv = "FBFVI_OUTPUT_ROOT";

RunReport run(const ExperimentConfig& config, std::ostream& log);

// Counts per bin [e_i, e_{i+1}); values below the first edge land in the
// first bin and values at or above the last edge in the last bin.
std::vector<std::size_t> gap_histogram(const std::vector<double>& gaps,
                                       const std::vector<double>& edges);

inline constexpr const char* kTraceHeader =
    "iter,eps,residual,gamma,dist_to_known,evals,projections,ms,x_norm,step_norm";

void write_trace(const IterationTrace& trace, const std::filesystem::path& path, bool timing);
IterationTrace read_trace(const std::filesystem::path& path);

// o/d gaps written by `run` for DUE problems (empty optional = undefined).
std::vector<std::optional<double>> read_gaps(const std::filesystem::path& path);

// Exit codes of the command-line tool.
enum ExitCode : int { kSuccess = 0, kConfigError = 1, kRuntimeFailure = 2, kIoFailure = 3 };

}  // namespace fbfvi::harness
