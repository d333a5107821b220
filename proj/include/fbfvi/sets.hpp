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

// Closed convex feasible sets with exact projections in the weighted inner
// product of the space module.

#include <cstddef>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include "fbfvi/kernels.hpp"
#include "fbfvi/space.hpp"

namespace fbfvi {

struct Box {
  HVector lower;
  HVector upper;

  Box(HVector lower, HVector upper);
  // Same bounds for every entry of a (channels x bins) vector.
  static Box uniform(std::size_t channels, std::size_t bins, double lower, double upper);
};

struct Ball {
  HVector center;
  double radius;

  Ball(HVector center, double radius);
};

// Path flows grouped by o/d pair. Each group's time-integrated total must
// equal its demand; with `nonneg` set, flows are also nonnegative.
struct DemandFlowSet {
  std::vector<std::vector<std::size_t>> groups;  // channel indices per group
  std::vector<double> demands;
  TimeGrid grid;
  bool nonneg = true;

  DemandFlowSet(std::vector<std::vector<std::size_t>> groups, std::vector<double> demands,
                TimeGrid grid, bool nonneg = true);

  std::size_t channels() const { return channel_count_; }
  // Group index of each channel.
  const std::vector<std::size_t>& owner() const { return owner_; }

 private:
  std::size_t channel_count_ = 0;
  std::vector<std::size_t> owner_;
};

using FeasibleSet = std::variant<Box, Ball, DemandFlowSet>;

struct ProjectionReport {
  HVector point;
  std::vector<double> multipliers;  // one per group, DemandFlowSet only
  double feasibility_residual = 0.0;
};

struct SliceProjection {
  std::vector<double> x;
  double lambda = 0.0;
};

// argmin sum_i w_i (x_i - v_i)^2  s.t.  sum_i w_i x_i = Q  (and x >= 0 when
// nonneg). The solution is x_i = max(0, v_i - lambda) where lambda is the
// root of phi(lambda) = sum_i w_i max(0, v_i - lambda) - Q.
SliceProjection project_demand_slice(std::span<const double> v, std::span<const double> weights,
                                     double demand, bool nonneg = true);

// Slices up to this length use the exact breakpoint scan; longer ones use
// safeguarded bisection.
inline constexpr std::size_t kExactScanLimit = 100000;

// Scan and bisection entry points, exposed for tests and benchmarks.
SliceProjection project_demand_slice_scan(std::span<const double> v,
                                          std::span<const double> weights, double demand);
SliceProjection project_demand_slice_bisect(std::span<const double> v,
                                            std::span<const double> weights, double demand);

ProjectionReport project(const FeasibleSet& set, const HVector& x, const TimeGrid& grid,
                         kernels::Exec exec = kernels::Exec::parallel);

bool contains(const FeasibleSet& set, const HVector& x, const TimeGrid& grid, double tol);

// Largest constraint violation of x (0 for members).
double feasibility_residual(const FeasibleSet& set, const HVector& x, const TimeGrid& grid);

// Shape (channels, bins) of vectors the set lives in.
std::pair<std::size_t, std::size_t> set_shape(const FeasibleSet& set);

// Gaussian draw around the set's natural center, projected onto the set.
HVector sample_feasible(const FeasibleSet& set, const TimeGrid& grid, std::mt19937_64& rng);

}  // namespace fbfvi
