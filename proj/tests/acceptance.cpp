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

// Acceptance checks, one per criterion. Prints one PASS/FAIL line each and
// exits nonzero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fbfvi/due.hpp"
#include "fbfvi/harness.hpp"
#include "fbfvi/solvers.hpp"
#include "oracles.hpp"

using namespace fbfvi;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

SolveOptions options(double tol, std::size_t kmax) {
  SolveOptions o;
  o.tol = tol;
  o.kmax = kmax;
  o.record_time = false;
  return o;
}

Schedule schedule(double alpha_scale, double beta_bar) {
  ScheduleParams p;
  p.alpha_scale = alpha_scale;
  p.beta_bar = beta_bar;
  return Schedule(p);
}

HVector to_hvector(const Eigen::VectorXd& v) {
  HVector out(static_cast<std::size_t>(v.size()), 1);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = v[static_cast<int>(k)];
  return out;
}

// Instances shared by the oracle and descent-inequality checks.
struct AffineInstance {
  std::uint64_t seed;
  std::size_t dim;
  VIProblem problem;
  HVector solution;
};

std::vector<AffineInstance> oracle_instances() {
  std::vector<AffineInstance> out;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ProblemParams params;
    params.dim = 2 + seed % 5;
    params.random = true;
    params.seed = seed;
    VIProblem p = builtin_problem("linear_monotone", params);
    const auto sol =
        oracle::affine_box_solution(random_spd_affine(params.dim, seed), -2.0, 2.0);
    if (!sol) throw std::runtime_error("oracle failed on seed " + std::to_string(seed));
    out.push_back({seed, params.dim, std::move(p), to_hvector(*sol)});
  }
  return out;
}

HVector random_start(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed + 1000);
  std::normal_distribution<double> n(0.0, 2.0);
  HVector x(dim, 1);
  for (double& v : x.data()) v = n(rng);
  return x;
}

Outcome criterion1() {
  Outcome out;
  const auto start = Clock::now();
  for (std::size_t d : {2u, 10u}) {
    ProblemParams params;
    params.dim = d;
    const VIProblem p = builtin_problem("zero_operator_box", params);
    HVector x0(d, 1, 2.0);
    const auto r = solve_fbf(p, AdaptiveStep{}, Schedule(), x0, options(1e-300, 100000));
    const double err = distance(r.x_final, HVector(d, 1, 1.0), p.grid);
    out.detail << " d=" << d << " fbf error " << err << " in " << r.iterations << " iterations;";
    out.require(err <= 1e-4, "fbf error <= 1e-4");

    std::mt19937_64 rng(d);
    const HVector feasible = sample_feasible(p.set, p.grid, rng);
    const auto t = solve_tseng_plain(p, AdaptiveStep{}, feasible, options(1e-300, 1000));
    out.require(t.x_final == feasible, "tseng stays at x0");
    out.detail << " tseng moved " << distance(t.x_final, feasible, p.grid) << ";";
  }
  const double elapsed = seconds_since(start);
  out.detail << " " << elapsed << " s";
  out.require(elapsed < 5.0, "runtime < 5 s");
  return out;
}

Outcome criterion2() {
  Outcome out;
  const auto start = Clock::now();
  ProblemParams params;
  params.dim = 1;
  const VIProblem p = builtin_problem("hinge_interval", params);
  const HVector x0 = HVector::from_values({2.5});
  const auto f = solve_fbf(p, AdaptiveStep{}, Schedule(), x0, options(1e-300, 100000));
  out.detail << " fbf x = " << f.x_final[0] << ";";
  out.require(std::abs(f.x_final[0]) <= 1e-4, "|x_fbf| <= 1e-4");

  // gamma0 = 1/L would make the first Tseng step return x0 exactly.
  const auto t = solve_tseng_plain(p, AdaptiveStep{0.5, 0.5}, x0, options(1e-12, 100000));
  const auto e = solve_extragradient(p, 0.5, x0, options(1e-12, 100000));
  const auto g = solve_projected_gradient(p, 0.5, x0, options(1e-12, 100000));
  for (const auto& [name, r] : {std::pair{"tseng", &t}, std::pair{"extragradient", &e},
                                std::pair{"projected_gradient", &g}}) {
    const double x = r->x_final[0];
    out.detail << " " << name << " x = " << x << ";";
    out.require(r->status == SolveStatus::Converged, std::string(name) + " converges");
    out.require(x >= -2.0 && x <= 1.0 + 1e-4, std::string(name) + " ends in the solution set");
    out.require(std::abs(x) > 1e-2, std::string(name) + " ends away from the minimal-norm point");
  }
  const double elapsed = seconds_since(start);
  out.detail << " " << elapsed << " s";
  out.require(elapsed < 1.0, "runtime < 1 s");
  return out;
}

Outcome criterion3() {
  Outcome out;
  const auto start = Clock::now();
  double worst = 0.0;
  for (const AffineInstance& in : oracle_instances()) {
    const VIProblem& p = in.problem;
    const HVector x0(in.dim, 1, 0.5);
    const double l = *p.lipschitz_hint;
    const Schedule fine = schedule(1e-3, 0.5);
    const auto fc = solve_fbf(p, ConstantStep{0.99 / l}, fine, x0, options(1e-300, 100000));
    const auto fa = solve_fbf(p, AdaptiveStep{}, fine, x0, options(1e-300, 100000));
    const auto eg = solve_extragradient(p, 0.9 / l, x0, options(1e-28, 100000));
    const auto ts = solve_tseng_plain(p, AdaptiveStep{}, x0, options(1e-28, 100000));
    for (const auto* r : {&fc, &fa, &eg, &ts}) {
      worst = std::max(worst, distance(r->x_final, in.solution, p.grid));
    }
  }
  const double elapsed = seconds_since(start);
  out.detail << " largest distance to the QP oracle " << worst << "; " << elapsed << " s";
  out.require(worst <= 1e-5, "all solvers within 1e-5");
  out.require(elapsed < 30.0, "runtime < 30 s");
  return out;
}

Outcome criterion4() {
  Outcome out;
  ProblemParams params;
  params.dim = 4;
  params.random = true;
  params.seed = 5;
  const VIProblem parent = builtin_problem("linear_monotone", params);
  const VIProblem scaled = builtin_problem("scaled_pseudomonotone", params);
  const HVector x0(4, 1, 0.0);
  const Schedule fine = schedule(1e-3, 0.5);
  const auto a = solve_fbf(parent, AdaptiveStep{}, fine, x0, options(1e-300, 200000));
  const auto b = solve_fbf(scaled, AdaptiveStep{}, fine, x0, options(1e-300, 200000));
  const double gap = distance(a.x_final, b.x_final, parent.grid);
  const auto sol = oracle::affine_box_solution(random_spd_affine(4, 5), -2.0, 2.0);
  const double to_oracle = distance(b.x_final, to_hvector(*sol), parent.grid);
  const MonotonicityReport m = sample_monotonicity(scaled, 10000, 11);
  out.detail << " scaled vs parent " << gap << ", scaled vs oracle " << to_oracle
             << "; monotone violations " << m.monotone_violations
             << ", pseudomonotone violations " << m.pseudomonotone_violations << " of "
             << m.samples;
  out.require(gap <= 1e-5, "scaled matches parent within 1e-5");
  out.require(m.monotone_violations > 0, "not monotone");
  out.require(m.pseudomonotone_violations == 0, "pseudomonotone");
  return out;
}

Outcome criterion5() {
  Outcome out;
  double worst_constant = std::numeric_limits<double>::infinity();
  double worst_adaptive = std::numeric_limits<double>::infinity();
  std::size_t checked = 0;
  for (const AffineInstance& in : oracle_instances()) {
    const VIProblem& p = in.problem;
    const TimeGrid& g = p.grid;
    const double l = *p.lipschitz_hint;
    const HVector x0 = random_start(in.dim, in.seed);
    const double gamma = 0.99 / l;
    SolveOptions c = options(1e-14, 20000);
    c.observer = [&](const IterationState& s) {
      const double lhs = std::pow(distance(*s.r, in.solution, g), 2);
      const double rhs = std::pow(distance(*s.x, in.solution, g), 2) -
                         (1.0 - gamma * gamma * l * l) * std::pow(distance(*s.x, *s.z, g), 2);
      worst_constant = std::min(worst_constant, rhs - lhs);
      ++checked;
    };
    solve_fbf(p, ConstantStep{gamma}, Schedule(), x0, c);

    const double rho = 0.5;
    SolveOptions a = options(1e-14, 20000);
    a.observer = [&](const IterationState& s) {
      const double ratio = s.gamma * rho / s.gamma_next;
      const double lhs = std::pow(distance(*s.r, in.solution, g), 2);
      const double rhs = std::pow(distance(*s.x, in.solution, g), 2) -
                         (1.0 - ratio * ratio) * std::pow(distance(*s.x, *s.z, g), 2);
      worst_adaptive = std::min(worst_adaptive, rhs - lhs);
      ++checked;
    };
    solve_fbf(p, AdaptiveStep{1.0, rho}, Schedule(), x0, a);
  }
  out.detail << " smallest slack constant " << worst_constant << ", adaptive " << worst_adaptive
             << " over " << checked << " iterations";
  out.require(worst_constant >= -1e-8, "constant-step slack >= -1e-8");
  out.require(worst_adaptive >= -1e-8, "adaptive slack >= -1e-8");
  return out;
}

Outcome criterion6() {
  Outcome out;
  double worst_margin = std::numeric_limits<double>::infinity();
  bool nonincreasing = true;
  for (const AffineInstance& in : oracle_instances()) {
    const VIProblem& p = in.problem;
    const double l = *p.lipschitz_hint;
    double previous = std::numeric_limits<double>::infinity();
    double last = 0.0;
    SolveOptions o = options(1e-14, 20000);
    o.observer = [&](const IterationState& s) {
      nonincreasing = nonincreasing && s.gamma <= previous && s.gamma_next <= s.gamma;
      previous = s.gamma;
      last = s.gamma_next;
    };
    solve_fbf(p, AdaptiveStep{10.0, 0.5}, Schedule(), random_start(in.dim, in.seed), o);
    worst_margin = std::min(worst_margin, last - std::min(10.0, 0.5 / l));
  }
  out.detail << " non-increasing " << (nonincreasing ? "yes" : "no")
             << ", smallest final gamma - min(gamma0, rho/L) = " << worst_margin;
  out.require(nonincreasing, "gamma non-increasing");
  out.require(worst_margin >= -1e-12, "gamma floor");
  return out;
}

Outcome criterion7() {
  Outcome out;
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  double worst_char = std::numeric_limits<double>::infinity();
  std::size_t draws = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const oracle::Instance in = oracle::random_instance(rng, trial % 2 == 0);
    const auto expected = oracle::oracle_projection(in);
    if (!expected) {
      out.require(false, "oracle solved the draw");
      continue;
    }
    const HVector z = project(in.set, in.v, in.grid).point;
    worst = std::max(worst, distance(z, *expected, in.grid));
    ++draws;
    // <v - z, y - z> <= 0 for feasible y.
    for (int s = 0; s < 1000; ++s) {
      const HVector y = sample_feasible(FeasibleSet{in.set}, in.grid, rng);
      const double value = inner(in.v - z, y - z, in.grid);
      const double scale = std::max(1.0, norm(in.v - z, in.grid) * norm(y - z, in.grid));
      worst_char = std::min(worst_char, -value / scale);
    }
  }
  out.detail << " " << draws << " draws, largest distance to the oracle " << worst
             << ", smallest characterization slack " << worst_char;
  out.require(worst <= 1e-8, "projection within 1e-8");
  out.require(worst_char >= -1e-10, "variational characterization");
  return out;
}

struct DueCase {
  const char* fixture;
  std::size_t bins;
  AdaptiveStep step;
  double alpha_scale;
  double beta_bar;
  double pg_gamma;
};

const std::vector<DueCase>& due_cases() {
  static const std::vector<DueCase> cases = {
      {"two_path_toy", 12, {1000.0, 0.99}, 1e-3, 0.97, 100.0},
      {"nguyen_topology", 48, {1000.0, 0.9}, 0.1, 0.9, 1000.0},
  };
  return cases;
}

struct DueInstance {
  due::Fixture fixture;
  TimeGrid grid = TimeGrid::unit();
  due::DueProblem due;
};

DueInstance due_instance(const DueCase& c) {
  DueInstance in{due::fixture(c.fixture), TimeGrid::uniform(0.0, 2.0, c.bins), {}};
  const due::AffineKernel kernel =
      due::synthetic_affine_kernel(in.fixture.network, in.fixture.paths, in.grid);
  in.due = due::build_due_problem(in.fixture.network, in.fixture.paths, kernel,
                                  due::Penalty{1.0, 2}, in.grid);
  return in;
}

Outcome criterion8() {
  Outcome out;
  for (const DueCase& c : due_cases()) {
    const auto start = Clock::now();
    const DueInstance in = due_instance(c);
    const auto& owner = in.fixture.paths.owner;
    const std::size_t pairs = in.fixture.network.od_pairs.size();
    const auto r = solve_fbf(in.due.problem, c.step, schedule(c.alpha_scale, c.beta_bar),
                             due::uniform_flow(in.fixture.network, in.fixture.paths, in.grid),
                             options(1e-4, 100000));
    const double elapsed = seconds_since(start);
    const HVector& h = r.z_final;
    const HVector psi = evaluate(in.due.problem, h);
    double hmax = 0.0;
    for (double v : h.data()) hmax = std::max(hmax, v);
    const double theta = 1e-6 * hmax;
    const double violation = due::support_violation(h, psi, owner, pairs, theta);
    const auto gaps = due::od_gap(h, psi, owner, pairs, theta);
    std::vector<double> defined;
    for (const auto& g : gaps) {
      if (g) defined.push_back(*g);
    }
    const auto hist = harness::gap_histogram(defined, {0.0, 0.1, 0.2, 0.3});
    out.detail << " " << c.fixture << " (M=" << c.bins << "): " << to_string(r.status)
               << " after " << r.iterations << " iterations, support violation " << violation
               << ", gap histogram [0,.1,.2,.3]:";
    for (std::size_t n : hist) out.detail << " " << n;
    out.detail << ", " << elapsed << " s;";
    out.require(r.status == SolveStatus::Converged, std::string(c.fixture) + " reaches eps");
    out.require(violation <= 5e-3, std::string(c.fixture) + " support condition");
    out.require(defined.size() == pairs, std::string(c.fixture) + " gaps defined");
    if (std::string(c.fixture) == "nguyen_topology") {
      out.require(elapsed < 60.0, "Nguyen runtime < 60 s");
    }
  }
  return out;
}

Outcome criterion9() {
  Outcome out;
  for (const DueCase& c : due_cases()) {
    const DueInstance in = due_instance(c);
    const VIProblem& p = in.due.problem;
    const HVector x0 = due::uniform_flow(in.fixture.network, in.fixture.paths, in.grid);
    const MonotonicityReport m = sample_monotonicity(p, 10000, 17);
    const auto f = solve_fbf(p, c.step, schedule(c.alpha_scale, c.beta_bar), x0,
                             options(1e-4, 100000));
    const auto g = solve_projected_gradient(p, c.pg_gamma, x0, options(1e-4, 100000));
    const auto e = solve_extragradient(p, c.pg_gamma, x0, options(1e-4, 100000));
    const double ratio = static_cast<double>(std::max(f.iterations, g.iterations)) /
                         static_cast<double>(std::max<std::size_t>(1, std::min(f.iterations, g.iterations)));
    const auto per = [](const SolveResult& r) {
      return static_cast<double>(r.projections) / static_cast<double>(r.iterations);
    };
    out.detail << " " << c.fixture << ": monotone violations " << m.monotone_violations << "/"
               << m.samples << "; fbf " << f.iterations << " (" << to_string(f.status)
               << "), pg " << g.iterations << " (" << to_string(g.status) << "), ratio "
               << ratio << "; projections per iteration " << per(f) << "/" << per(g) << "/"
               << per(e) << ";";
    out.require(f.status == SolveStatus::Converged && g.status == SolveStatus::Converged,
                std::string(c.fixture) + " both converge");
    out.require(ratio <= 5.0, std::string(c.fixture) + " iteration counts within 5x");
    out.require(f.projections == f.iterations, "fbf projects once per iteration");
    out.require(g.projections == g.iterations, "pg projects once per iteration");
    out.require(e.projections == 2 * e.iterations, "extragradient projects twice");
  }
  return out;
}

Outcome criterion10() {
  Outcome out;
  due::Fixture f;
  f.network.nodes = {"A", "B"};
  f.network.links = {{"a", "A", "B", 0.1, 1000.0}};
  f.network.od_pairs = {{"A", "B", 1000.0, 1.0}};
  f.paths.ids = {"p"};
  f.paths.links = {{0}};
  f.paths.owner = {0};
  const TimeGrid grid = TimeGrid::uniform(0.0, 2.0, 40);
  const double width = grid.weight(0);
  HVector h(1, grid.bins(), 0.0);
  for (std::size_t i = 0; i < grid.bins(); ++i) {
    if (grid.bin_mid(i) < 0.5) h(0, i) = 2000.0;
  }
  const due::LoadingResult r = due::load_point_queue(f.network, f.paths, h, grid);
  double peak_queue = 0.0;
  for (std::size_t n = 0; n < r.steps(); ++n) peak_queue = std::max(peak_queue, r.queue(0, n));
  double peak_delay = 0.0;
  for (std::size_t i = 0; i < grid.bins(); ++i) {
    peak_delay = std::max(peak_delay, r.delays(0, i) - 0.1);
  }
  out.detail << " peak queue " << peak_queue << " veh, peak delay " << peak_delay
             << " h (bin width " << width << " h);";
  out.require(std::abs(peak_queue - 500.0) <= 1000.0 * width, "peak queue within one bin");
  out.require(std::abs(peak_delay - 0.5) <= width, "peak delay within one bin");

  // FIFO and conservation under random congested loads.
  const due::Fixture n = due::fixture("nguyen_topology");
  const TimeGrid g = TimeGrid::uniform(0.0, 2.0, 24);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 3000.0);
  bool fifo = true;
  double worst_balance = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    HVector load(n.paths.size(), g.bins());
    for (double& v : load.data()) v = u(rng);
    const due::LoadingResult lr = due::load_point_queue(n.network, n.paths, load, g);
    for (std::size_t p = 0; p < n.paths.size(); ++p) {
      double previous = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k <= 1000; ++k) {
        const double t = 2.0 * static_cast<double>(k) / 1000;
        const double exit = lr.path_exit_time(n.network, n.paths, p, t);
        fifo = fifo && exit >= previous;
        previous = exit;
      }
    }
    double total = 0.0;
    for (std::size_t k = 0; k < load.size(); ++k) total += load[k] * g.weight(k % g.bins());
    for (std::size_t a = 0; a < n.network.links.size(); ++a) {
      const due::LinkCurves& c = lr.links[a];
      const double left_inside = c.inflow.back() - c.outflow.back();
      worst_balance = std::max(worst_balance, std::abs(left_inside) / std::max(1.0, total));
    }
    // Every departing vehicle enters the network.
    double entered = 0.0;
    for (std::size_t a = 0; a < n.network.links.size(); ++a) {
      const std::string& from = n.network.links[a].from;
      for (const auto& od : n.network.od_pairs) {
        if (od.origin == from) {
          entered += lr.links[a].inflow.back();
          break;
        }
      }
    }
    worst_balance = std::max(worst_balance, std::abs(entered - total) / total);
  }
  out.detail << " FIFO " << (fifo ? "holds" : "violated") << ", worst relative balance "
             << worst_balance;
  out.require(fifo, "FIFO exit times non-decreasing");
  out.require(worst_balance <= 1e-8, "conservation within 1e-8");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> selected;
  app.add_option("--criterion", selected, "criterion numbers to run (default: all)")
      ->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) {
    for (int k = 1; k <= 10; ++k) selected.push_back(k);
  }
  const std::vector<std::function<Outcome()>> checks = {
      criterion1, criterion2, criterion3, criterion4, criterion5,
      criterion6, criterion7, criterion8, criterion9, criterion10};
  bool all = true;
  for (int k : selected) {
    Outcome o;
    try {
      o = checks[static_cast<std::size_t>(k - 1)]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " exception: " << e.what();
    }
    std::printf("criterion %d: %s%s\n", k, o.pass ? "PASS" : "FAIL", o.detail.str().c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
