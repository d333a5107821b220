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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "fbfvi/due.hpp"
#include "fbfvi/error.hpp"
#include "fbfvi/harness.hpp"

namespace fbfvi::harness {

namespace fs = std::filesystem;

bool RunReport::all_converged() const {
  return std::all_of(solvers.begin(), solvers.end(),
                     [](const SolverSummary& s) { return s.status == SolveStatus::Converged; });
}

int RunReport::exit_code() const { return all_converged() ? kSuccess : kRuntimeFailure; }

std::vector<std::size_t> gap_histogram(const std::vector<double>& gaps,
                                       const std::vector<double>& edges) {
  if (edges.size() < 2) throw ConstructionError("gap histogram needs at least two edges");
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (!(edges[i] < edges[i + 1])) {
      throw ConstructionError("gap histogram edges must be strictly increasing");
    }
  }
  std::vector<std::size_t> counts(edges.size() - 1, 0);
  for (double g : gaps) {
    if (!std::isfinite(g)) throw DomainError("gap histogram: non-finite gap value");
    // upper_bound gives the first edge > g; bin index is one less.
    const auto it = std::upper_bound(edges.begin(), edges.end(), g);
    std::size_t bin = it == edges.begin() ? 0 : static_cast<std::size_t>(it - edges.begin()) - 1;
    bin = std::min(bin, counts.size() - 1);
    ++counts[bin];
  }
  return counts;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void close_out(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_num(const std::string& s, const fs::path& path, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError(path.string() + ":" + std::to_string(line) + ": bad number '" + s + "'");
  }
}

fs::path output_directory(const std::string& dir) {
  fs::path p(dir);
  if (p.is_relative()) {
    if (const char* root = std::getenv(kOutputRootEnv); root && *root) p = fs::path(root) / p;
  }
  return p;
}

// Everything needed to evaluate DUE metrics after a solve.
struct NetworkContext {
  due::Fixture fixture;
  std::shared_ptr<due::ClampLog> clamp_log;
};

struct Built {
  VIProblem problem;
  std::optional<NetworkContext> network;
};

Built build(const ExperimentConfig& config) {
  const ProblemSpec& p = config.problem;
  Built out;
  const bool network = p.kind == "network" || p.name == "due";
  if (!network) {
    ProblemParams params;
    params.dim = p.dim;
    params.seed = p.seed;
    params.random = p.random;
    params.lower = p.lower;
    params.upper = p.upper;
    params.radius = p.radius;
    out.problem = builtin_problem(p.name, params);
    return out;
  }
  NetworkContext ctx;
  if (p.files) {
    ctx.fixture = due::read_network(p.files->nodes, p.files->links, p.files->od, p.files->paths);
  } else {
    ctx.fixture = due::fixture(p.fixture.empty() ? "two_path_toy" : p.fixture);
  }
  const TimeGrid grid = TimeGrid::uniform(config.grid.t0, config.grid.t1, config.grid.bins);
  due::DelayModel model;
  if (p.delay == "affine") {
    model = due::synthetic_affine_kernel(ctx.fixture.network, ctx.fixture.paths, grid, p.bandwidth,
                                         due::parse_time_profile(p.time_profile));
  } else {
    model = due::PointQueue{p.substeps};
  }
  const due::Penalty penalty{p.penalty_coefficient, p.penalty_exponent};
  due::DueProblem dp =
      due::build_due_problem(ctx.fixture.network, ctx.fixture.paths, model, penalty, grid, p.nonneg);
  out.problem = std::move(dp.problem);
  ctx.clamp_log = dp.clamp_log;
  out.network = std::move(ctx);
  return out;
}

HVector start_point(const Built& built, const SolverSpec& s) {
  const VIProblem& problem = built.problem;
  const std::string kind = !s.start.empty() ? s.start : built.network ? "uniform" : "random";
  if (kind == "zero") return HVector(problem.channels(), problem.bins(), 0.0);
  if (kind == "uniform") {
    if (!built.network) throw ConfigError("solver " + s.name + ": start = uniform needs a network problem");
    return due::uniform_flow(built.network->fixture.network, built.network->fixture.paths,
                             problem.grid);
  }
  std::mt19937_64 rng(s.seed);
  if (kind == "feasible") return sample_feasible(problem.set, problem.grid, rng);
  HVector x(problem.channels(), problem.bins());
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : x.data()) v = normal(rng);
  return x;
}

double baseline_gamma(const VIProblem& problem, const SolverSpec& s) {
  if (s.gamma) return *s.gamma;
  if (!problem.lipschitz_hint) {
    throw ConfigError("solver " + s.name + ": gamma is required (no Lipschitz bound for " +
                      problem.name + ")");
  }
  return kConstantStepMargin / *problem.lipschitz_hint;
}

SolveResult solve(const VIProblem& problem, const SolverSpec& s, const HVector& x0) {
  SolveOptions opts;
  opts.tol = s.tol;
  opts.kmax = s.kmax;
  StepRule step = AdaptiveStep{s.gamma0, s.rho};
  if (s.step == "constant") step = ConstantStep{baseline_gamma(problem, s)};
  if (s.method == "fbf") return solve_fbf(problem, step, Schedule(s.schedule), x0, opts);
  if (s.method == "tseng") return solve_tseng_plain(problem, step, x0, opts);
  if (s.method == "extragradient") {
    return solve_extragradient(problem, baseline_gamma(problem, s), x0, opts);
  }
  return solve_projected_gradient(problem, baseline_gamma(problem, s), x0, opts);
}

struct Outcome {
  std::optional<SolveResult> result;
  std::exception_ptr error;
};

void write_due_reports(const Built& built, const OutputSpec& output, const SolverSpec& s,
                       const SolveResult& result, const fs::path& dir, SolverSummary& summary) {
  const auto& net = built.network->fixture.network;
  const auto& paths = built.network->fixture.paths;
  const VIProblem& problem = built.problem;
  const HVector& h = result.z_final;
  const HVector psi = evaluate(problem, h);
  double hmax = 0.0;
  for (double v : h.data()) hmax = std::max(hmax, v);
  const double theta = output.support_threshold * hmax;
  const std::size_t ods = net.od_pairs.size();
  summary.od_gaps = due::od_gap(h, psi, paths.owner, ods, theta);
  summary.support_violation = due::support_violation(h, psi, paths.owner, ods, theta);
  std::vector<double> defined;
  for (const auto& g : summary.od_gaps) {
    if (g) defined.push_back(*g);
  }
  summary.gap_histogram = gap_histogram(defined, output.gap_edges);

  const fs::path gaps_path = dir / (s.name + "_gaps.csv");
  auto gaps = open_out(gaps_path);
  gaps << "od,origin,destination,gap\n";
  for (std::size_t w = 0; w < ods; ++w) {
    gaps << w << ',' << net.od_pairs[w].origin << ',' << net.od_pairs[w].destination << ','
         << (summary.od_gaps[w] ? num(*summary.od_gaps[w]) : "") << '\n';
  }
  close_out(gaps, gaps_path);

  const fs::path hist_path = dir / (s.name + "_gap_histogram.csv");
  auto hist = open_out(hist_path);
  hist << "lower,upper,count\n";
  for (std::size_t i = 0; i < summary.gap_histogram.size(); ++i) {
    hist << num(output.gap_edges[i]) << ',' << num(output.gap_edges[i + 1]) << ','
         << summary.gap_histogram[i] << '\n';
  }
  close_out(hist, hist_path);

  const fs::path flows_path = dir / (s.name + "_flows.csv");
  auto flows = open_out(flows_path);
  flows << "path,od,bin,t_mid,flow,effective_delay\n";
  for (std::size_t p = 0; p < paths.size(); ++p) {
    for (std::size_t i = 0; i < problem.grid.bins(); ++i) {
      flows << paths.ids[p] << ',' << paths.owner[p] << ',' << i << ','
            << num(problem.grid.bin_mid(i)) << ',' << num(h(p, i)) << ',' << num(psi(p, i))
            << '\n';
    }
  }
  close_out(flows, flows_path);
}

}  // namespace

void write_trace(const IterationTrace& trace, const fs::path& path, bool timing) {
  auto out = open_out(path);
  out << kTraceHeader << '\n';
  for (const TraceRow& r : trace.rows) {
    out << r.iter << ',' << num(r.eps) << ',' << num(r.residual) << ',' << num(r.gamma) << ','
        << (r.dist_to_known ? num(*r.dist_to_known) : "") << ',' << r.evals << ','
        << r.projections << ',' << num(timing ? r.wall_ms : 0.0) << ',' << num(r.x_norm) << ','
        << num(r.step_norm) << '\n';
  }
  close_out(out, path);
}

IterationTrace read_trace(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) {
    throw IoError(path.string() + ": unexpected trace header");
  }
  IterationTrace trace;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto c = split(line);
    if (c.size() != 10) throw IoError(path.string() + ":" + std::to_string(n) + ": expected 10 fields");
    TraceRow r;
    r.iter = static_cast<std::size_t>(parse_num(c[0], path, n));
    r.eps = parse_num(c[1], path, n);
    r.residual = parse_num(c[2], path, n);
    r.gamma = parse_num(c[3], path, n);
    if (!c[4].empty()) r.dist_to_known = parse_num(c[4], path, n);
    r.evals = static_cast<std::size_t>(parse_num(c[5], path, n));
    r.projections = static_cast<std::size_t>(parse_num(c[6], path, n));
    r.wall_ms = parse_num(c[7], path, n);
    r.x_norm = parse_num(c[8], path, n);
    r.step_norm = parse_num(c[9], path, n);
    trace.rows.push_back(r);
  }
  return trace;
}

std::vector<std::optional<double>> read_gaps(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open gaps " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<std::optional<double>> gaps;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto c = split(line);
    if (c.size() != 4) throw IoError(path.string() + ":" + std::to_string(n) + ": expected 4 fields");
    gaps.push_back(c[3].empty() ? std::nullopt : std::optional(parse_num(c[3], path, n)));
  }
  return gaps;
}

RunReport run(const ExperimentConfig& config, std::ostream& log) {
  validate(config);
  Built built;
  try {
    built = build(config);
  } catch (const IoError&) {
    throw;
  } catch (const ConstructionError& e) {
    throw ConfigError(std::string("problem: ") + e.what());
  }

  const std::size_t n = config.solvers.size();
  std::vector<HVector> starts;
  for (const SolverSpec& s : config.solvers) starts.push_back(start_point(built, s));

  std::vector<Outcome> outcomes(n);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < n; ++i) {
    try {
      outcomes[i].result = solve(built.problem, config.solvers[i], starts[i]);
    } catch (...) {
      outcomes[i].error = std::current_exception();
    }
  }
  for (const Outcome& o : outcomes) {
    if (!o.error) continue;
    try {
      std::rethrow_exception(o.error);
    } catch (const ConstructionError& e) {
      throw ConfigError(e.what());
    }
  }

  RunReport report;
  report.output_dir = output_directory(config.output.dir);
  std::error_code ec;
  fs::create_directories(report.output_dir, ec);
  if (ec) throw IoError("cannot create " + report.output_dir.string() + ": " + ec.message());
  // The resolved config, grid included, so runs stay comparable.
  {
    const fs::path config_path = report.output_dir / "config.yaml";
    auto out = open_out(config_path);
    out << serialize(config);
    close_out(out, config_path);
  }
  log << "grid: " << config.grid.bins << " bins on [" << num(config.grid.t0) << ", "
      << num(config.grid.t1) << "]\n";

  for (std::size_t i = 0; i < n; ++i) {
    const SolverSpec& s = config.solvers[i];
    const SolveResult& r = *outcomes[i].result;
    SolverSummary sum;
    sum.name = s.name;
    sum.method = s.method;
    sum.status = r.status;
    sum.message = r.message;
    sum.iterations = r.iterations;
    sum.evals = r.operator_evals;
    sum.projections = r.projections;
    if (!r.trace.rows.empty()) {
      const TraceRow& last = r.trace.rows.back();
      sum.final_eps = last.eps;
      sum.final_residual = last.residual;
      sum.dist_to_known = last.dist_to_known;
      sum.wall_ms = last.wall_ms;
    }
    sum.trace_path = report.output_dir / (s.name + "_trace.csv");
    write_trace(r.trace, sum.trace_path, config.output.timing);
    if (built.network && r.status != SolveStatus::Diverged) {
      write_due_reports(built, config.output, s, r, report.output_dir, sum);
    }
    log << s.name << ": " << to_string(sum.status) << " after " << sum.iterations
        << " iterations (eps " << num(sum.final_eps) << ")";
    if (sum.support_violation) log << ", support violation " << num(*sum.support_violation);
    if (!sum.message.empty()) log << ", " << sum.message;
    log << '\n';
    report.solvers.push_back(std::move(sum));
  }
  if (built.network && built.network->clamp_log) {
    const auto& c = *built.network->clamp_log;
    if (c.clamped_calls > 0) {
      log << "point-queue clamp: " << c.clamped_calls << " calls, max " << num(c.max_clamp)
          << '\n';
    }
  }

  const fs::path summary_path = report.output_dir / "summary.csv";
  auto out = open_out(summary_path);
  out << "solver,method,status,iterations,evals,projections,final_eps,final_residual,"
         "dist_to_known,support_violation,wall_ms,trace,message\n";
  for (const SolverSummary& s : report.solvers) {
    std::string message = s.message;
    std::replace(message.begin(), message.end(), ',', ';');
    out << s.name << ',' << s.method << ',' << to_string(s.status) << ',' << s.iterations << ','
        << s.evals << ',' << s.projections << ',' << num(s.final_eps) << ','
        << num(s.final_residual) << ',' << (s.dist_to_known ? num(*s.dist_to_known) : "") << ','
        << (s.support_violation ? num(*s.support_violation) : "") << ','
        << num(s.wall_ms) << ',' << s.trace_path.filename().string()
        << ',' << message << '\n';
  }
  close_out(out, summary_path);
  return report;
}

}  // namespace fbfvi::harness
