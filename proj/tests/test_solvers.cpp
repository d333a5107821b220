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

#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "fbfvi/error.hpp"
#include "fbfvi/solvers.hpp"

using namespace fbfvi;

namespace {

VIProblem identity_on_interval(double lo, double hi) {
  VIProblem p;
  p.name = "identity";
  p.set = Box::uniform(1, 1, lo, hi);
  p.lipschitz_hint = 1.0;
  p.op = [](const HVector& x) { return x; };
  return p;
}

VIProblem builtin(const char* name, std::size_t dim, bool random = false, std::uint64_t seed = 0) {
  ProblemParams params;
  params.dim = dim;
  params.random = random;
  params.seed = seed;
  return builtin_problem(name, params);
}

SolveOptions quiet(double tol, std::size_t kmax) {
  SolveOptions o;
  o.tol = tol;
  o.kmax = kmax;
  o.record_time = false;
  return o;
}

}  // namespace

TEST_CASE("fbf step examples") {
  const VIProblem p = identity_on_interval(-1.0, 2.0);
  const FbfStep s = fbf_step(p, HVector::from_values({2.0}), 0.5);
  CHECK(s.z[0] == doctest::Approx(1.0));
  CHECK(s.r[0] == doctest::Approx(1.5));

  const VIProblem zero = builtin("zero_operator_box", 3);
  const HVector x = HVector::from_values({1.2, 1.9, 1.0});
  const FbfStep f = fbf_step(zero, x, 0.7);
  CHECK(f.z == x);
  CHECK(f.r == x);
  CHECK_THROWS_AS(fbf_step(p, HVector::from_values({0.0}), 0.0), ConstructionError);
}

TEST_CASE("fbf correction is bounded by the Lipschitz constant") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 3.0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const VIProblem p = builtin("linear_monotone", 4, true, seed);
    const double l = *p.lipschitz_hint;
    for (int k = 0; k < 100; ++k) {
      HVector x(4, 1);
      for (double& v : x.data()) v = n(rng);
      const double gamma = 0.9 / l;
      const FbfStep s = fbf_step(p, x, gamma);
      CHECK(distance(s.r, s.z, p.grid) <= gamma * l * distance(x, s.z, p.grid) * (1 + 1e-12));
    }
  }
}

TEST_CASE("adaptive step update") {
  const TimeGrid g = TimeGrid::unit();
  const HVector x = HVector::from_values({0.0});
  const HVector z = HVector::from_values({1.0});
  CHECK(adaptive_gamma_update(1.0, 0.5, x, z, x, x, g) == 1.0);
  CHECK(adaptive_gamma_update(1.0, 0.5, x, z, HVector::from_values({0.0}),
                              HVector::from_values({4.0}), g) == doctest::Approx(0.125));
  CHECK(adaptive_gamma_update(0.1, 0.5, x, z, HVector::from_values({0.0}),
                              HVector::from_values({4.0}), g) == 0.1);
}

TEST_CASE("adaptive steps stay above min(gamma0, rho / L)") {
  VIProblem p = identity_on_interval(-5.0, 5.0);
  p.op = [](const HVector& x) { return 2.0 * x; };
  p.lipschitz_hint = 2.0;
  SolveOptions o = quiet(1e-300, 2000);
  double last = std::numeric_limits<double>::infinity();
  bool monotone = true;
  o.observer = [&](const IterationState& s) {
    monotone = monotone && s.gamma_next <= s.gamma && s.gamma <= last;
    last = s.gamma_next;
  };
  solve_fbf(p, AdaptiveStep{10.0, 0.5}, Schedule(), HVector::from_values({3.0}), o);
  CHECK(monotone);
  CHECK(last >= 0.25 - 1e-12);
}

TEST_CASE("relative gap") {
  const TimeGrid g = TimeGrid::unit();
  const HVector x = HVector::from_values({1.0, 0.0});
  CHECK(relative_gap(x, x, g).value == 0.0);
  CHECK(relative_gap(HVector::from_values({1.1, 0.0}), x, g).value == doctest::Approx(0.01));
  const HVector a = HVector::from_values({0.3, -2.0});
  const HVector b = HVector::from_values({1.0, 0.5});
  CHECK(relative_gap(-3.0 * a, -3.0 * b, g).value ==
        doctest::Approx(relative_gap(a, b, g).value).epsilon(1e-14));
  const RelativeGap z = relative_gap(x, HVector(2, 1, 0.0), g);
  CHECK(z.zero_denominator);
  CHECK(std::isinf(z.value));
}

TEST_CASE("schedule contract") {
  const Schedule s;
  CHECK(s.alpha(0) == doctest::Approx(0.5));
  CHECK(s.beta(0) == doctest::Approx(0.25));
  CHECK(s.floor() < s.beta(0));
  CHECK_NOTHROW(s.validate(100000));
  double sum = 0.0;
  for (std::size_t k = 0; k < 100000; ++k) sum += s.alpha(k);
  CHECK(sum > 10.0);
  CHECK(s.alpha(100000) < 1e-4);

  ScheduleParams bad;
  bad.alpha_scale = 3.0;
  CHECK_THROWS_AS(Schedule{bad}, ConstructionError);
  bad = {};
  bad.beta_bar = 1.0;
  CHECK_THROWS_AS(Schedule{bad}, ConstructionError);
  const Schedule wide([](std::size_t) { return 0.3; }, [](std::size_t) { return 0.8; }, 0.1);
  CHECK_THROWS_AS(wide.validate(5), ConstructionError);
  const Schedule low([](std::size_t) { return 0.3; }, [](std::size_t) { return 0.05; }, 0.1);
  CHECK_THROWS_AS(low.validate(5), ConstructionError);
}

TEST_CASE("constant steps need an analytic bound and the safety margin") {
  const VIProblem p = builtin("linear_monotone", 2);
  const HVector x0(2, 1, 0.0);
  CHECK_THROWS_AS(solve_fbf(p, ConstantStep{1.0}, Schedule(), x0, quiet(1e-6, 10)),
                  ConstructionError);
  const double limit = 0.99 / *p.lipschitz_hint;
  CHECK_NOTHROW(solve_fbf(p, ConstantStep{limit}, Schedule(), x0, quiet(1e-6, 10)));
  CHECK_THROWS_AS(solve_fbf(p, ConstantStep{limit * (1 + 1e-9)}, Schedule(), x0, quiet(1e-6, 10)),
                  ConstructionError);
  VIProblem no_hint = p;
  no_hint.lipschitz_hint.reset();
  CHECK_THROWS_AS(solve_tseng_plain(no_hint, ConstantStep{0.1}, x0, quiet(1e-6, 10)),
                  ConstructionError);
  CHECK_THROWS_AS(solve_fbf(p, AdaptiveStep{1.0, 1.0}, Schedule(), x0, quiet(1e-6, 10)),
                  ConstructionError);
  CHECK_THROWS_AS(solve_fbf(p, AdaptiveStep{}, Schedule(), HVector(3, 1), quiet(1e-6, 10)),
                  DimensionError);
}

TEST_CASE("fbf selects the minimal-norm solution") {
  const VIProblem zero = builtin("zero_operator_box", 2);
  const auto r = solve_fbf(zero, AdaptiveStep{}, Schedule(), HVector::from_values({2.0, 1.7}),
                           quiet(1e-300, 100000));
  CHECK(distance(r.x_final, HVector(2, 1, 1.0), zero.grid) <= 1e-4);

  // The anchor biases iterates by O(alpha_k); a small scale removes most of it.
  ScheduleParams fine;
  fine.alpha_scale = 1e-3;
  const VIProblem lin = builtin("linear_monotone", 3);
  for (const StepRule& step : {StepRule{ConstantStep{0.9}}, StepRule{AdaptiveStep{}}}) {
    const auto s = solve_fbf(lin, step, Schedule(fine), HVector(3, 1, 0.5), quiet(1e-300, 100000));
    CHECK(distance(s.x_final, HVector(3, 1, 1.0), lin.grid) <= 1e-5);
  }
}

TEST_CASE("baselines") {
  const VIProblem zero = builtin("zero_operator_box", 2);
  const HVector x0 = HVector::from_values({2.0, 2.0});
  const auto eg = solve_extragradient(zero, 0.5, x0, quiet(1e-8, 50));
  CHECK(eg.x_final == x0);
  CHECK(eg.status == SolveStatus::Converged);
  CHECK(eg.projections == 2 * eg.iterations);
  CHECK(eg.operator_evals == 2 * eg.iterations);
  const auto ts = solve_tseng_plain(zero, AdaptiveStep{}, x0, quiet(1e-8, 50));
  CHECK(ts.x_final == x0);
  const auto pg = solve_projected_gradient(zero, 0.5, HVector::from_values({5.0, -3.0}),
                                           quiet(1e-300, 20));
  CHECK(pg.x_final == HVector::from_values({2.0, 1.0}));
  CHECK(pg.projections == pg.iterations);
  CHECK(pg.operator_evals == pg.iterations);

  const VIProblem lin = builtin("linear_monotone", 4, true, 2);
  const HVector start(4, 1, 0.0);
  ScheduleParams fine;
  fine.alpha_scale = 1e-3;
  const auto fbf = solve_fbf(lin, AdaptiveStep{}, Schedule(fine), start, quiet(1e-300, 100000));
  CHECK(fbf.projections == fbf.iterations);
  CHECK(fbf.operator_evals == 2 * fbf.iterations);
  const auto tseng = solve_tseng_plain(lin, AdaptiveStep{}, start, quiet(1e-300, 20000));
  const double gamma = 0.9 / *lin.lipschitz_hint;
  const auto extra = solve_extragradient(lin, gamma, start, quiet(1e-300, 20000));
  const auto proj = solve_projected_gradient(lin, gamma / *lin.lipschitz_hint, start,
                                             quiet(1e-300, 200000));
  for (const auto* r : {&fbf, &tseng, &extra, &proj}) {
    CHECK(distance(r->x_final, *lin.known_solution, lin.grid) <= 1e-4);
  }
}

TEST_CASE("projected gradient does not converge on a rotation") {
  ProblemParams params;
  params.dim = 2;
  params.radius = 10.0;
  const VIProblem skew = builtin_problem("skew", params);
  double previous = 0.0;
  bool nondecreasing = true;
  SolveOptions o = quiet(1e-300, 500);
  o.observer = [&](const IterationState& s) {
    const double n = norm(*s.x_next, skew.grid);
    nondecreasing = nondecreasing && n >= previous * (1.0 - 1e-15);
    previous = n;
  };
  previous = norm(HVector::from_values({0.5, 0.0}), skew.grid);
  const auto r = solve_projected_gradient(skew, 0.3, HVector::from_values({0.5, 0.0}), o);
  CHECK(nondecreasing);
  CHECK(r.status == SolveStatus::MaxIters);
  CHECK(norm(r.x_final, skew.grid) == doctest::Approx(10.0));
}

TEST_CASE("FBF descent and boundedness on monotone problems") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const VIProblem p = builtin("linear_monotone", 5, true, seed);
    const HVector& sol = *p.known_solution;
    const double l = *p.lipschitz_hint;
    const double gamma = 0.99 / l;
    HVector x0(5, 1);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 2.0);
    for (double& v : x0.data()) v = n(rng);
    const double bound =
        std::max(distance(x0, sol, p.grid), norm(sol, p.grid)) + 1e-8;
    double worst = std::numeric_limits<double>::infinity();
    double max_dist = 0.0;
    SolveOptions o = quiet(1e-12, 3000);
    o.observer = [&](const IterationState& s) {
      const double lhs = std::pow(distance(*s.r, sol, p.grid), 2);
      const double rhs = std::pow(distance(*s.x, sol, p.grid), 2) -
                         (1.0 - gamma * gamma * l * l) * std::pow(distance(*s.x, *s.z, p.grid), 2);
      worst = std::min(worst, rhs - lhs);
      max_dist = std::max(max_dist, distance(*s.x_next, sol, p.grid));
    };
    solve_fbf(p, ConstantStep{gamma}, Schedule(), x0, o);
    CHECK(worst >= -1e-8);
    CHECK(max_dist <= bound);
  }
}

TEST_CASE("divergence and operator failures are reported") {
  VIProblem p = identity_on_interval(-1e300, 1e300);
  p.op = [](const HVector& x) { return -1.0 * x; };
  const auto r = solve_projected_gradient(p, 1.0, HVector::from_values({1.0}), quiet(1e-12, 100));
  CHECK(r.status == SolveStatus::Diverged);
  p.op = [](const HVector& x) {
    HVector out = x;
    if (x[0] < 0.5) out[0] = std::numeric_limits<double>::infinity();
    return out;
  };
  const auto q = solve_fbf(p, AdaptiveStep{}, Schedule(), HVector::from_values({1.0}),
                           quiet(1e-12, 100));
  CHECK(q.status == SolveStatus::Diverged);
  CHECK_FALSE(q.message.empty());
}

TEST_CASE("stopping, ties and trace thinning") {
  const VIProblem zero = builtin("zero_operator_box", 2);
  const HVector x0 = HVector::from_values({1.5, 1.5});
  // Tseng from a solution: eps = 0 at the first iteration, which is also kmax.
  const auto tie = solve_tseng_plain(zero, AdaptiveStep{}, x0, quiet(0.0, 1));
  CHECK(tie.status == SolveStatus::Converged);
  CHECK(tie.iterations == 1);

  SolveOptions o = quiet(1e-300, 10050);
  const auto long_run = solve_fbf(zero, AdaptiveStep{}, Schedule(), x0, o);
  CHECK(long_run.status == SolveStatus::MaxIters);
  // 10000 dense rows, strided rows 10000..10040, and the final iterate.
  CHECK(long_run.trace.rows.size() == 10000 + 5 + 1);
  CHECK(long_run.trace.rows.back().iter == 10049);
  CHECK(long_run.trace.rows[10000].iter == 10000);
  CHECK(long_run.trace.rows[10001].iter == 10010);
}

TEST_CASE("identical inputs give identical traces") {
  const VIProblem p = builtin("linear_monotone", 6, true, 4);
  const HVector x0(6, 1, 0.5);
  const auto a = solve_fbf(p, AdaptiveStep{}, Schedule(), x0, quiet(1e-10, 5000));
  const auto b = solve_fbf(p, AdaptiveStep{}, Schedule(), x0, quiet(1e-10, 5000));
  REQUIRE(a.trace.rows.size() == b.trace.rows.size());
  for (std::size_t k = 0; k < a.trace.rows.size(); ++k) {
    CHECK(a.trace.rows[k].eps == b.trace.rows[k].eps);
    CHECK(a.trace.rows[k].gamma == b.trace.rows[k].gamma);
    CHECK(a.trace.rows[k].residual == b.trace.rows[k].residual);
  }
  CHECK(a.x_final == b.x_final);
}
