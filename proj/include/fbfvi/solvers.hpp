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

// Forward-backward-forward solvers with a vanishing anchor toward the
// origin (strong convergence to the minimal-norm solution), with constant
// or adaptive step sizes, plus the baselines they are compared against:
// Tseng's plain FBF, extragradient and projected gradient.

#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fbfvi/operators.hpp"
#include "fbfvi/space.hpp"

namespace fbfvi {

// alpha_k = scale / (k + offset)^power,  beta_k = beta_bar * (1 - alpha_k).
struct ScheduleParams {
  double alpha_scale = 1.0;
  double alpha_offset = 2.0;
  double alpha_power = 1.0;
  double beta_bar = 0.5;

  friend bool operator==(const ScheduleParams&, const ScheduleParams&) = default;
};

class Schedule {
 public:
  explicit Schedule(const ScheduleParams& params = {});
  // Arbitrary sequences; `floor` is the constant alpha with beta_k > alpha.
  Schedule(std::function<double(std::size_t)> alpha, std::function<double(std::size_t)> beta,
           double floor);

  double alpha(std::size_t k) const { return alpha_(k); }
  double beta(std::size_t k) const { return beta_(k); }
  double floor() const { return floor_; }

  // Throws ConstructionError unless alpha_k in (0, 1) and
  // floor < beta_k < 1 - alpha_k for every k <= kmax.
  void validate(std::size_t kmax) const;

 private:
  std::function<double(std::size_t)> alpha_;
  std::function<double(std::size_t)> beta_;
  double floor_;
};

struct ConstantStep {
  double gamma;
};

struct AdaptiveStep {
  double gamma0 = 1.0;
  double rho = 0.5;
};

using StepRule = std::variant<ConstantStep, AdaptiveStep>;

enum class SolveStatus { Converged, MaxIters, Diverged };
std::string to_string(SolveStatus status);

struct TraceRow {
  std::size_t iter = 0;
  double eps = 0.0;       // relative gap after this iteration
  double residual = 0.0;  // ||x^k - z^k||
  double gamma = 0.0;     // step used at iteration k
  std::optional<double> dist_to_known;
  std::size_t evals = 0;        // cumulative operator evaluations
  std::size_t projections = 0;  // cumulative projections
  double wall_ms = 0.0;
  double x_norm = 0.0;     // ||x^k||
  double step_norm = 0.0;  // ||x^{k+1} - x^k||
};

struct IterationTrace {
  std::vector<TraceRow> rows;
};

// Everything an observer may inspect after iteration k.
struct IterationState {
  std::size_t k = 0;
  const HVector* x = nullptr;       // x^k
  const HVector* z = nullptr;       // z^k (projected point)
  const HVector* r = nullptr;       // r^k (FBF correction; null for other methods)
  const HVector* x_next = nullptr;  // x^{k+1}
  double gamma = 0.0;               // step used at k
  double gamma_next = 0.0;          // step for k + 1
};

using Observer = std::function<void(const IterationState&)>;

struct SolveOptions {
  double tol = 1e-4;
  std::size_t kmax = 10000;
  Observer observer;
  // Record every iteration up to this count, then every `stride`-th (the
  // last iteration is always recorded).
  std::size_t trace_full_until = 10000;
  std::size_t trace_stride = 10;
  bool record_time = true;
};

struct SolveResult {
  HVector x_final;
  HVector z_final;  // last projected (feasible) point
  SolveStatus status = SolveStatus::MaxIters;
  IterationTrace trace;
  std::size_t iterations = 0;
  std::size_t operator_evals = 0;
  std::size_t projections = 0;
  std::string message;
};

struct RelativeGap {
  double value = 0.0;
  bool zero_denominator = false;
};

// ||x_next - x||^2 / ||x||^2; +inf with the flag set when ||x|| = 0 and
// x_next != x.
RelativeGap relative_gap(const HVector& x_next, const HVector& x, const TimeGrid& grid);

struct FbfStep {
  HVector z;
  HVector r;
  HVector fx;
  HVector fz;
};

// z = P_X(x - gamma F(x)),  r = z + gamma (F(x) - F(z)).
FbfStep fbf_step(const VIProblem& problem, const HVector& x, double gamma);

// gamma_{k+1} = min(rho ||z - x|| / ||F(z) - F(x)||, gamma_k) if F(z) != F(x),
// else gamma_k.
double adaptive_gamma_update(double gamma, double rho, const HVector& x, const HVector& z,
                             const HVector& fx, const HVector& fz, const TimeGrid& grid);

// Constant steps must satisfy gamma <= kConstantStepMargin / L.
inline constexpr double kConstantStepMargin = 0.99;

// x^{k+1} = (1 - alpha_k - beta_k) x^k + beta_k r^k.
SolveResult solve_fbf(const VIProblem& problem, const StepRule& step, const Schedule& schedule,
                      const HVector& x0, const SolveOptions& options);

// x^{k+1} = r^k.
SolveResult solve_tseng_plain(const VIProblem& problem, const StepRule& step, const HVector& x0,
                              const SolveOptions& options);

// y = P_X(x - gamma F(x)),  x^{k+1} = P_X(x - gamma F(y)).
SolveResult solve_extragradient(const VIProblem& problem, double gamma, const HVector& x0,
                                const SolveOptions& options);

// x^{k+1} = P_X(x - gamma F(x)).
SolveResult solve_projected_gradient(const VIProblem& problem, double gamma, const HVector& x0,
                                     const SolveOptions& options);

}  // namespace fbfvi
