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

#include "fbfvi/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "fbfvi/error.hpp"
#include "fbfvi/kernels.hpp"

namespace fbfvi {

HVector evaluate(const VIProblem& problem, const HVector& x) {
  const auto [channels, bins] = set_shape(problem.set);
  if (x.channels() != channels || x.bins() != bins) {
    throw DimensionError("evaluate: input shape does not match problem " + problem.name);
  }
  HVector fx = problem.op(x);
  if (!fx.same_shape(x)) {
    throw DimensionError("evaluate: operator of " + problem.name + " changed the shape");
  }
  std::vector<std::size_t> bad;
  for (std::size_t k = 0; k < fx.size(); ++k) {
    if (!std::isfinite(fx[k])) bad.push_back(k);
  }
  if (!bad.empty()) {
    const std::string message = "operator of " + problem.name + " returned " +
                                std::to_string(bad.size()) + " non-finite entries";
    throw OperatorEvaluationError(message, std::move(bad));
  }
  return fx;
}

namespace {

struct SamplePairs {
  std::vector<HVector> x;
  std::vector<HVector> y;
};

// Draws are generated serially so that results do not depend on the thread
// count; evaluation over pairs is parallel.
SamplePairs draw_pairs(const VIProblem& problem, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SamplePairs pairs;
  pairs.x.reserve(n);
  pairs.y.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    pairs.x.push_back(sample_feasible(problem.set, problem.grid, rng));
    pairs.y.push_back(sample_feasible(problem.set, problem.grid, rng));
  }
  return pairs;
}

}  // namespace

MonotonicityReport sample_monotonicity(const VIProblem& problem, std::size_t n,
                                       std::uint64_t seed) {
  const SamplePairs pairs = draw_pairs(problem, n, seed);
  const TimeGrid& grid = problem.grid;
  std::vector<unsigned char> mono(n, 0);
  std::vector<unsigned char> pseudo(n, 0);
  std::vector<double> worst(n, 0.0);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t s = 0; s < count; ++s) {
    const auto i = static_cast<std::size_t>(s);
    const HVector& x = pairs.x[i];
    const HVector& y = pairs.y[i];
    const HVector fx = evaluate(problem, x);
    const HVector fy = evaluate(problem, y);
    const HVector dyx = y - x;
    const double a = inner(fx, dyx, grid);  // <F(x), y - x>
    const double b = inner(fy, dyx, grid);  // <F(y), y - x>
    const double scale = norm(dyx, grid) * (norm(fx, grid) + norm(fy, grid));
    const double tol = 1e-10 * std::max(1.0, scale);
    // <F(y) - F(x), y - x> = b - a
    if (b - a < -tol) {
      mono[i] = 1;
      worst[i] = std::max(worst[i], a - b);
    }
    // x -> y: a >= 0 must give b >= 0; y -> x: -b >= 0 must give -a >= 0.
    if ((a >= 0.0 && b < -tol) || (b <= 0.0 && a > tol)) {
      pseudo[i] = 1;
      worst[i] = std::max(worst[i], a >= 0.0 && b < -tol ? -b : a);
    }
  }
  MonotonicityReport report;
  report.samples = n;
  for (std::size_t i = 0; i < n; ++i) {
    report.monotone_violations += mono[i];
    report.pseudomonotone_violations += pseudo[i];
    report.worst_violation = std::max(report.worst_violation, worst[i]);
  }
  return report;
}

double estimate_lipschitz(const VIProblem& problem, std::size_t n, std::uint64_t seed) {
  const SamplePairs pairs = draw_pairs(problem, n, seed);
  std::vector<double> ratio(n, 0.0);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t s = 0; s < count; ++s) {
    const auto i = static_cast<std::size_t>(s);
    const double dx = distance(pairs.x[i], pairs.y[i], problem.grid);
    if (dx == 0.0) continue;
    const double df =
        distance(evaluate(problem, pairs.x[i]), evaluate(problem, pairs.y[i]), problem.grid);
    ratio[i] = df / dx;
  }
  double best = 0.0;
  for (double r : ratio) best = std::max(best, r);
  return best;
}

double sampled_vi_slack(const VIProblem& problem, const HVector& p, std::size_t n,
                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const HVector fp = evaluate(problem, p);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < n; ++s) {
    const HVector x = sample_feasible(problem.set, problem.grid, rng);
    worst = std::min(worst, inner(fp, x - p, problem.grid));
  }
  return worst;
}

double spectral_norm(const std::vector<double>& matrix, std::size_t d) {
  if (matrix.size() != d * d) throw DimensionError("spectral_norm: matrix is not d x d");
  // Cyclic Jacobi on the symmetric matrix A^T A; the largest diagonal entry
  // after convergence is sigma_max^2.
  std::vector<double> s(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += matrix[k * d + i] * matrix[k * d + j];
      s[i * d + j] = acc;
    }
  }
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    double diag = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      diag += s[i * d + i] * s[i * d + i];
      for (std::size_t j = i + 1; j < d; ++j) off += s[i * d + j] * s[i * d + j];
    }
    if (off <= 1e-32 * diag) break;
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = s[p * d + q];
        if (apq == 0.0) continue;
        const double theta = (s[q * d + q] - s[p * d + p]) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < d; ++k) {
          const double akp = s[k * d + p];
          const double akq = s[k * d + q];
          s[k * d + p] = c * akp - sn * akq;
          s[k * d + q] = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double apk = s[p * d + k];
          const double aqk = s[q * d + k];
          s[p * d + k] = c * apk - sn * aqk;
          s[q * d + k] = sn * apk + c * aqk;
        }
      }
    }
  }
  double top = 0.0;
  for (std::size_t i = 0; i < d; ++i) top = std::max(top, s[i * d + i]);
  return std::sqrt(top);
}

AffineData random_spd_affine(std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> b(d * d);
  for (double& v : b) v = normal(rng);
  AffineData data;
  data.matrix.assign(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += b[k * d + i] * b[k * d + j];
      data.matrix[i * d + j] = s / static_cast<double>(d) + (i == j ? 1.0 : 0.0);
    }
  }
  data.offset.resize(d);
  for (double& v : data.offset) v = 3.0 * normal(rng);
  return data;
}

VIProblem make_affine_problem(std::string name, std::vector<double> matrix,
                              std::vector<double> offset, FeasibleSet set) {
  const std::size_t d = offset.size();
  if (matrix.size() != d * d) throw DimensionError("affine problem: matrix is not d x d");
  const auto [channels, bins] = set_shape(set);
  if (channels != d || bins != 1) throw DimensionError("affine problem: set is not in R^d");
  // Round up so the hint stays an upper bound.
  const double lipschitz = spectral_norm(matrix, d) * (1.0 + 1e-9);
  auto op = [matrix = std::move(matrix), offset = std::move(offset)](const HVector& x) {
    HVector out(x.channels(), 1);
    kernels::dense_matvec(out.data(), matrix, x.data(), kernels::Exec::serial);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += offset[i];
    return out;
  };
  return VIProblem{std::move(name), std::move(op), std::move(set), TimeGrid::unit(),
                   lipschitz > 0.0 ? std::optional<double>(lipschitz) : std::nullopt,
                   std::nullopt};
}

HVector projected_gradient_fixed_point(const VIProblem& problem, const HVector& x0, double gamma,
                                       std::size_t max_iters) {
  HVector x = project(problem.set, x0, problem.grid).point;
  for (std::size_t k = 0; k < max_iters; ++k) {
    HVector step = x;
    step -= gamma * evaluate(problem, x);
    HVector next = project(problem.set, step, problem.grid).point;
    const double change = distance(next, x, problem.grid);
    x = std::move(next);
    if (change <= 1e-15 * std::max(1.0, norm(x, problem.grid))) break;
  }
  return x;
}

}  // namespace fbfvi
