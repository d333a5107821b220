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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fbfvi/sets.hpp"
#include "fbfvi/space.hpp"

namespace fbfvi {

// F : H -> H. Must be pure and reentrant.
using Operator = std::function<HVector(const HVector&)>;

struct VIProblem {
  std::string name;
  Operator op;
  FeasibleSet set = Box::uniform(1, 1, 0.0, 0.0);
  TimeGrid grid = TimeGrid::unit();
  // Upper bound on the Lipschitz constant, when one is known analytically.
  std::optional<double> lipschitz_hint;
  // Minimal-norm solution, for test problems that have one.
  std::optional<HVector> known_solution;

  std::size_t channels() const { return set_shape(set).first; }
  std::size_t bins() const { return set_shape(set).second; }
};

struct MonotonicityReport {
  std::size_t samples = 0;
  std::size_t monotone_violations = 0;
  std::size_t pseudomonotone_violations = 0;
  // Most negative value seen in a violated inequality, reported as a
  // nonnegative magnitude.
  double worst_violation = 0.0;
};

// One evaluation of F; throws OperatorEvaluationError on non-finite output.
HVector evaluate(const VIProblem& problem, const HVector& x);

// Checks n sampled pairs of feasible points for violations of monotonicity
// <F(x) - F(y), x - y> >= 0 and of pseudomonotonicity
// <F(x), y - x> >= 0  =>  <F(y), y - x> >= 0 (either orientation).
MonotonicityReport sample_monotonicity(const VIProblem& problem, std::size_t n,
                                       std::uint64_t seed);

// Largest difference quotient ||F(x) - F(y)|| / ||x - y|| over n sampled pairs.
double estimate_lipschitz(const VIProblem& problem, std::size_t n, std::uint64_t seed);

// min over n sampled feasible x of <F(p), x - p>; nonnegative (up to
// rounding) when p solves the VI.
double sampled_vi_slack(const VIProblem& problem, const HVector& p, std::size_t n,
                        std::uint64_t seed);

// Spectral norm of a dense d x d matrix (Jacobi eigenvalues of A^T A).
double spectral_norm(const std::vector<double>& matrix, std::size_t d);

struct AffineData {
  std::vector<double> matrix;  // d x d row-major
  std::vector<double> offset;
};

// M = I + B^T B / d with B standard Gaussian, q Gaussian with standard
// deviation 3; deterministic in (d, seed).
AffineData random_spd_affine(std::size_t d, std::uint64_t seed);

// F(x) = M x + q on the given set (finite-dimensional: unit grid, M = 1 bin).
VIProblem make_affine_problem(std::string name, std::vector<double> matrix,
                              std::vector<double> offset, FeasibleSet set);

// x <- P(x - gamma F(x)) until successive iterates agree to 1e-15 (or the
// iteration budget runs out). Used to populate reference solutions of
// strongly monotone instances.
HVector projected_gradient_fixed_point(const VIProblem& problem, const HVector& x0, double gamma,
                                       std::size_t max_iters = 1000000);

struct ProblemParams {
  std::size_t dim = 2;
  std::uint64_t seed = 0;
  // linear_monotone / scaled_pseudomonotone: random symmetric positive
  // definite M = I + B^T B / d and Gaussian q instead of M = I, q = -1.
  bool random = false;
  std::optional<double> lower;
  std::optional<double> upper;
  double radius = 1.0;

  // due
  std::string fixture = "two_path_toy";
  std::size_t bins = 12;
  std::string delay_model = "affine";
  double penalty_coefficient = 1.0;
  int penalty_exponent = 2;
};

// Names: linear_monotone, skew, scaled_pseudomonotone, zero_operator_box,
// hinge_interval, due.
VIProblem builtin_problem(const std::string& name, const ProblemParams& params = {});
const std::vector<std::string>& builtin_problem_names();

}  // namespace fbfvi
