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
#include <string>

#include "fbfvi/due.hpp"
#include "fbfvi/error.hpp"
#include "fbfvi/operators.hpp"

namespace fbfvi {

namespace {

AffineData identity_affine(std::size_t d) {
  AffineData data;
  data.matrix.assign(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) data.matrix[i * d + i] = 1.0;
  data.offset.assign(d, -1.0);
  return data;
}

VIProblem linear_monotone(const ProblemParams& params) {
  const std::size_t d = params.dim;
  const AffineData data = params.random ? random_spd_affine(d, params.seed) : identity_affine(d);
  const double lo = params.lower.value_or(params.random ? -2.0 : 0.0);
  const double hi = params.upper.value_or(2.0);
  VIProblem problem =
      make_affine_problem("linear_monotone", data.matrix, data.offset, Box::uniform(d, 1, lo, hi));
  // Strongly monotone with modulus >= 1, so projected gradient with step
  // mu / L^2 contracts.
  const double l = *problem.lipschitz_hint;
  problem.known_solution = projected_gradient_fixed_point(
      problem, HVector(d, 1, 0.0), 1.0 / (l * l), 10'000'000);
  return problem;
}

VIProblem scaled_pseudomonotone(const ProblemParams& params) {
  VIProblem parent = linear_monotone(params);
  const AffineData data =
      params.random ? random_spd_affine(params.dim, params.seed) : identity_affine(params.dim);
  const double norm_m = *parent.lipschitz_hint;
  double norm_q = 0.0;
  for (double v : data.offset) norm_q += v * v;
  norm_q = std::sqrt(norm_q);
  VIProblem problem;
  problem.name = "scaled_pseudomonotone";
  problem.set = parent.set;
  problem.grid = parent.grid;
  // |DF| <= |M| / (1 + r) + (|M| r + |q|) / (1 + r)^2 <= |M| + |q|.
  problem.lipschitz_hint = norm_m + norm_q;
  problem.known_solution = parent.known_solution;
  problem.op = [inner_op = parent.op](const HVector& x) {
    double r = 0.0;
    for (double v : x.data()) r += v * v;
    HVector out = inner_op(x);
    out *= 1.0 / (1.0 + std::sqrt(r));
    return out;
  };
  return problem;
}

VIProblem skew(const ProblemParams& params) {
  const std::size_t d = params.dim;
  if (d % 2 != 0) throw ConstructionError("skew problem needs an even dimension");
  VIProblem problem;
  problem.name = "skew";
  problem.set = Ball(HVector(d, 1, 0.0), params.radius);
  problem.grid = TimeGrid::unit();
  problem.lipschitz_hint = 1.0;
  problem.known_solution = HVector(d, 1, 0.0);
  problem.op = [](const HVector& x) {
    HVector out(x.channels(), 1);
    for (std::size_t i = 0; i + 1 < x.size(); i += 2) {
      out[i] = x[i + 1];
      out[i + 1] = -x[i];
    }
    return out;
  };
  return problem;
}

VIProblem zero_operator_box(const ProblemParams& params) {
  const std::size_t d = params.dim;
  VIProblem problem;
  problem.name = "zero_operator_box";
  problem.set = Box::uniform(d, 1, params.lower.value_or(1.0), params.upper.value_or(2.0));
  problem.grid = TimeGrid::unit();
  // Any positive number bounds the Lipschitz constant of F = 0.
  problem.lipschitz_hint = 1.0;
  problem.known_solution = project(problem.set, HVector(d, 1, 0.0), problem.grid).point;
  problem.op = [](const HVector& x) { return HVector(x.channels(), x.bins(), 0.0); };
  return problem;
}

// F(x) = max(0, x - 1) on [-2, 3]: every point of [-2, 1] solves the VI.
VIProblem hinge_interval(const ProblemParams& params) {
  VIProblem problem;
  problem.name = "hinge_interval";
  problem.set = Box::uniform(1, 1, params.lower.value_or(-2.0), params.upper.value_or(3.0));
  problem.grid = TimeGrid::unit();
  problem.lipschitz_hint = 1.0;
  problem.known_solution = project(problem.set, HVector(1, 1, 0.0), problem.grid).point;
  problem.op = [](const HVector& x) {
    HVector out(1, 1);
    out[0] = std::max(0.0, x[0] - 1.0);
    return out;
  };
  return problem;
}

VIProblem due_problem(const ProblemParams& params) {
  const due::Fixture f = due::fixture(params.fixture);
  const TimeGrid grid = TimeGrid::uniform(0.0, 2.0, params.bins);
  due::DelayModel model;
  if (params.delay_model == "affine") {
    model = due::synthetic_affine_kernel(f.network, f.paths, grid);
  } else if (params.delay_model == "point_queue") {
    model = due::PointQueue{};
  } else {
    throw ConstructionError("unknown delay model: " + params.delay_model);
  }
  const due::Penalty penalty{params.penalty_coefficient, params.penalty_exponent};
  return due::build_due_problem(f.network, f.paths, model, penalty, grid).problem;
}

}  // namespace

const std::vector<std::string>& builtin_problem_names() {
  static const std::vector<std::string> names = {"linear_monotone",   "skew",
                                                 "scaled_pseudomonotone", "zero_operator_box",
                                                 "hinge_interval",    "due"};
  return names;
}

VIProblem builtin_problem(const std::string& name, const ProblemParams& params) {
  if (params.dim == 0) throw ConstructionError("problem dimension must be positive");
  if (name == "linear_monotone") return linear_monotone(params);
  if (name == "scaled_pseudomonotone") return scaled_pseudomonotone(params);
  if (name == "skew") return skew(params);
  if (name == "zero_operator_box") return zero_operator_box(params);
  if (name == "hinge_interval") return hinge_interval(params);
  if (name == "due") return due_problem(params);
  throw ConstructionError("unknown builtin problem: " + name);
}

}  // namespace fbfvi
