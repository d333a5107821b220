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

#include "fbfvi/solvers.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fbfvi/error.hpp"

namespace fbfvi {

Schedule::Schedule(const ScheduleParams& p) {
  if (!(p.alpha_scale > 0.0) || !(p.alpha_offset > 0.0) || !(p.alpha_power > 0.0) ||
      p.alpha_power > 1.0) {
    throw ConstructionError(
        "schedule: need alpha_scale > 0, alpha_offset > 0 and alpha_power in (0, 1]");
  }
  if (!(p.beta_bar > 0.0) || !(p.beta_bar < 1.0)) {
    throw ConstructionError("schedule: beta_bar must lie in (0, 1)");
  }
  const double a0 = p.alpha_scale / std::pow(p.alpha_offset, p.alpha_power);
  if (!(a0 < 1.0)) throw ConstructionError("schedule: alpha_0 must be < 1");
  alpha_ = [p](std::size_t k) {
    return p.alpha_scale / std::pow(static_cast<double>(k) + p.alpha_offset, p.alpha_power);
  };
  beta_ = [p, alpha = alpha_](std::size_t k) { return p.beta_bar * (1.0 - alpha(k)); };
  // alpha_k decreases, so beta_k >= beta_bar (1 - alpha_0) > floor.
  floor_ = 0.5 * p.beta_bar * (1.0 - a0);
}

Schedule::Schedule(std::function<double(std::size_t)> alpha,
                   std::function<double(std::size_t)> beta, double floor)
    : alpha_(std::move(alpha)), beta_(std::move(beta)), floor_(floor) {
  if (!(floor > 0.0)) throw ConstructionError("schedule: floor must be positive");
}

void Schedule::validate(std::size_t kmax) const {
  for (std::size_t k = 0; k <= kmax; ++k) {
    const double a = alpha_(k);
    const double b = beta_(k);
    if (!(a > 0.0 && a < 1.0)) {
      throw ConstructionError("schedule: alpha_" + std::to_string(k) + " = " +
                              std::to_string(a) + " is outside (0, 1)");
    }
    if (!(b > floor_ && b < 1.0 - a)) {
      throw ConstructionError("schedule: beta_" + std::to_string(k) + " = " +
                              std::to_string(b) + " is outside (floor, 1 - alpha_k)");
    }
  }
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged:
      return "Converged";
    case SolveStatus::MaxIters:
      return "MaxIters";
    case SolveStatus::Diverged:
      return "Diverged";
  }
  return "Unknown";
}

RelativeGap relative_gap(const HVector& x_next, const HVector& x, const TimeGrid& grid) {
  const double num = distance(x_next, x, grid);
  const double den = norm(x, grid);
  if (den == 0.0) {
    return num == 0.0 ? RelativeGap{0.0, true}
                      : RelativeGap{std::numeric_limits<double>::infinity(), true};
  }
  const double ratio = num / den;
  return {ratio * ratio, false};
}

FbfStep fbf_step(const VIProblem& problem, const HVector& x, double gamma) {
  if (!(gamma > 0.0)) throw ConstructionError("fbf_step: gamma must be positive");
  FbfStep s;
  s.fx = evaluate(problem, x);
  HVector forward = x;
  forward -= gamma * s.fx;
  s.z = project(problem.set, forward, problem.grid).point;
  s.fz = evaluate(problem, s.z);
  s.r = s.z;
  s.r += gamma * (s.fx - s.fz);
  return s;
}

double adaptive_gamma_update(double gamma, double rho, const HVector& x, const HVector& z,
                             const HVector& fx, const HVector& fz, const TimeGrid& grid) {
  const double df = distance(fz, fx, grid);
  if (df == 0.0) return gamma;
  return std::min(rho * distance(z, x, grid) / df, gamma);
}

namespace {

using Clock = std::chrono::steady_clock;

void check_start(const VIProblem& problem, const HVector& x0, const SolveOptions& options) {
  const auto [channels, bins] = set_shape(problem.set);
  if (x0.channels() != channels || x0.bins() != bins) {
    throw DimensionError("initial point does not match problem " + problem.name);
  }
  if (!(options.tol >= 0.0)) throw ConstructionError("tol must be >= 0");
  if (options.kmax == 0) throw ConstructionError("kmax must be >= 1");
  if (options.trace_stride == 0) throw ConstructionError("trace_stride must be >= 1");
}

double initial_gamma(const VIProblem& problem, const StepRule& step) {
  if (const auto* c = std::get_if<ConstantStep>(&step)) {
    if (!problem.lipschitz_hint) {
      throw ConstructionError("constant step needs a Lipschitz bound for problem " +
                              problem.name + "; use the adaptive rule");
    }
    const double limit = kConstantStepMargin / *problem.lipschitz_hint;
    if (!(c->gamma > 0.0) || c->gamma > limit) {
      throw ConstructionError("constant step " + std::to_string(c->gamma) +
                              " outside (0, 0.99/L] = (0, " + std::to_string(limit) + "]");
    }
    return c->gamma;
  }
  const auto& a = std::get<AdaptiveStep>(step);
  if (!(a.gamma0 > 0.0)) throw ConstructionError("adaptive step: gamma0 must be positive");
  if (!(a.rho > 0.0 && a.rho < 1.0)) {
    throw ConstructionError("adaptive step: rho must lie in (0, 1)");
  }
  return a.gamma0;
}

// Shared bookkeeping: trace thinning, divergence and stopping tests.
class Run {
 public:
  Run(const VIProblem& problem, const HVector& x0, const SolveOptions& options)
      : problem_(problem),
        options_(options),
        start_(Clock::now()),
        bound_(1e6 * (1.0 + norm(x0, problem.grid))) {
    result_.x_final = x0;
    result_.z_final = x0;
  }

  SolveResult& result() { return result_; }

  void count(std::size_t evals, std::size_t projections) {
    result_.operator_evals += evals;
    result_.projections += projections;
  }

  // Accepts x^{k+1}; returns true when the iteration loop should stop.
  bool finish_iteration(std::size_t k, HVector x_next, const HVector& z, double residual,
                        double gamma) {
    const HVector& x = result_.x_final;
    const RelativeGap gap = relative_gap(x_next, x, problem_.grid);
    const bool finite = x_next.all_finite() && !std::isnan(gap.value);
    const double next_norm = finite ? norm(x_next, problem_.grid) : 0.0;

    TraceRow row;
    row.iter = k;
    row.eps = gap.value;
    row.residual = residual;
    row.gamma = gamma;
    row.evals = result_.operator_evals;
    row.projections = result_.projections;
    row.x_norm = norm(x, problem_.grid);
    row.step_norm = finite ? distance(x_next, x, problem_.grid)
                           : std::numeric_limits<double>::quiet_NaN();
    if (problem_.known_solution && finite) {
      row.dist_to_known = distance(x_next, *problem_.known_solution, problem_.grid);
    }
    if (options_.record_time) {
      row.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
    }

    result_.iterations = k + 1;
    if (!finite || next_norm > bound_) {
      push(row, true);
      result_.status = SolveStatus::Diverged;
      result_.message = finite ? "iterate norm exceeded the divergence bound"
                               : "non-finite iterate";
      return true;
    }
    result_.x_final = std::move(x_next);
    result_.z_final = z;
    const bool converged = gap.value <= options_.tol;
    const bool last = converged || k + 1 == options_.kmax;
    push(row, last);
    if (converged) {
      result_.status = SolveStatus::Converged;
      return true;
    }
    if (last) result_.status = SolveStatus::MaxIters;
    return last;
  }

  SolveResult diverged(const std::string& why) {
    result_.status = SolveStatus::Diverged;
    result_.message = why;
    return std::move(result_);
  }

 private:
  void push(const TraceRow& row, bool force) {
    if (force || row.iter < options_.trace_full_until ||
        (row.iter - options_.trace_full_until) % options_.trace_stride == 0) {
      result_.trace.rows.push_back(row);
    }
  }

  const VIProblem& problem_;
  const SolveOptions& options_;
  Clock::time_point start_;
  double bound_;
  SolveResult result_;
};

void notify(const SolveOptions& options, IterationState state) {
  if (options.observer) options.observer(state);
}

SolveResult solve_fbf_family(const VIProblem& problem, const StepRule& step,
                             const Schedule* schedule, const HVector& x0,
                             const SolveOptions& options) {
  check_start(problem, x0, options);
  if (schedule) schedule->validate(options.kmax);
  double gamma = initial_gamma(problem, step);
  const auto* adaptive = std::get_if<AdaptiveStep>(&step);
  Run run(problem, x0, options);
  try {
    for (std::size_t k = 0; k < options.kmax; ++k) {
      const HVector x = run.result().x_final;
      FbfStep s = fbf_step(problem, x, gamma);
      run.count(2, 1);
      HVector x_next;
      if (schedule) {
        const double a = schedule->alpha(k);
        const double b = schedule->beta(k);
        x_next = combine({1.0 - a - b, b}, {&x, &s.r});
      } else {
        x_next = s.r;
      }
      const double gamma_next =
          adaptive ? adaptive_gamma_update(gamma, adaptive->rho, x, s.z, s.fx, s.fz, problem.grid)
                   : gamma;
      notify(options, {k, &x, &s.z, &s.r, &x_next, gamma, gamma_next});
      const double residual = distance(x, s.z, problem.grid);
      if (run.finish_iteration(k, std::move(x_next), s.z, residual, gamma)) break;
      gamma = gamma_next;
    }
  } catch (const OperatorEvaluationError& e) {
    return run.diverged(e.what());
  }
  return std::move(run.result());
}

}  // namespace

SolveResult solve_fbf(const VIProblem& problem, const StepRule& step, const Schedule& schedule,
                      const HVector& x0, const SolveOptions& options) {
  return solve_fbf_family(problem, step, &schedule, x0, options);
}

SolveResult solve_tseng_plain(const VIProblem& problem, const StepRule& step, const HVector& x0,
                              const SolveOptions& options) {
  return solve_fbf_family(problem, step, nullptr, x0, options);
}

SolveResult solve_extragradient(const VIProblem& problem, double gamma, const HVector& x0,
                                const SolveOptions& options) {
  check_start(problem, x0, options);
  if (!(gamma > 0.0)) throw ConstructionError("extragradient: gamma must be positive");
  Run run(problem, x0, options);
  try {
    for (std::size_t k = 0; k < options.kmax; ++k) {
      const HVector x = run.result().x_final;
      HVector forward = x;
      forward -= gamma * evaluate(problem, x);
      const HVector y = project(problem.set, forward, problem.grid).point;
      HVector corrected = x;
      corrected -= gamma * evaluate(problem, y);
      HVector x_next = project(problem.set, corrected, problem.grid).point;
      run.count(2, 2);
      notify(options, {k, &x, &y, nullptr, &x_next, gamma, gamma});
      const double residual = distance(x, y, problem.grid);
      if (run.finish_iteration(k, std::move(x_next), y, residual, gamma)) break;
    }
  } catch (const OperatorEvaluationError& e) {
    return run.diverged(e.what());
  }
  return std::move(run.result());
}

SolveResult solve_projected_gradient(const VIProblem& problem, double gamma, const HVector& x0,
                                     const SolveOptions& options) {
  check_start(problem, x0, options);
  if (!(gamma > 0.0)) throw ConstructionError("projected gradient: gamma must be positive");
  Run run(problem, x0, options);
  try {
    for (std::size_t k = 0; k < options.kmax; ++k) {
      const HVector x = run.result().x_final;
      HVector forward = x;
      forward -= gamma * evaluate(problem, x);
      HVector x_next = project(problem.set, forward, problem.grid).point;
      run.count(1, 1);
      notify(options, {k, &x, &x_next, nullptr, &x_next, gamma, gamma});
      const double residual = distance(x, x_next, problem.grid);
      const HVector z = x_next;
      if (run.finish_iteration(k, std::move(x_next), z, residual, gamma)) break;
    }
  } catch (const OperatorEvaluationError& e) {
    return run.diverged(e.what());
  }
  return std::move(run.result());
}

}  // namespace fbfvi
