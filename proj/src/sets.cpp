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

#include "fbfvi/sets.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fbfvi/error.hpp"

namespace fbfvi {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double phi(std::span<const double> v, std::span<const double> w, double demand, double lambda) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * std::max(0.0, v[i] - lambda);
  return s - demand;
}

// Recompute lambda from the active set {v_i > lambda}; exact once the set is
// right.
double polish_lambda(std::span<const double> v, std::span<const double> w, double demand,
                     double lambda) {
  double a = 0.0;
  double b = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] > lambda) {
      a += w[i] * v[i];
      b += w[i];
    }
  }
  if (b <= 0.0) return lambda;
  const double refined = (a - demand) / b;
  return std::abs(phi(v, w, demand, refined)) <= std::abs(phi(v, w, demand, lambda)) ? refined
                                                                                      : lambda;
}

SliceProjection finish(std::span<const double> v, double lambda) {
  SliceProjection out;
  out.lambda = lambda;
  out.x.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out.x[i] = std::max(0.0, v[i] - lambda);
  return out;
}

void validate_slice(std::span<const double> v, std::span<const double> weights, double demand) {
  if (v.size() != weights.size()) throw DimensionError("slice and weights differ in length");
  if (v.empty()) throw DimensionError("empty demand slice");
  if (!(demand > 0.0) || !std::isfinite(demand)) {
    throw ConstructionError("demand must be positive and finite");
  }
  for (double w : weights) {
    if (!(w > 0.0)) throw ConstructionError("slice weights must be positive");
  }
}

}  // namespace

Box::Box(HVector lo, HVector hi) : lower(std::move(lo)), upper(std::move(hi)) {
  check_same_shape(lower, upper);
  for (std::size_t k = 0; k < lower.size(); ++k) {
    if (!(lower[k] <= upper[k])) throw ConstructionError("box requires lower <= upper");
  }
}

Box Box::uniform(std::size_t channels, std::size_t bins, double lo, double hi) {
  return Box(HVector(channels, bins, lo), HVector(channels, bins, hi));
}

Ball::Ball(HVector c, double r) : center(std::move(c)), radius(r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw ConstructionError("ball radius must be positive");
}

DemandFlowSet::DemandFlowSet(std::vector<std::vector<std::size_t>> g, std::vector<double> q,
                             TimeGrid tg, bool nn)
    : groups(std::move(g)), demands(std::move(q)), grid(std::move(tg)), nonneg(nn) {
  if (groups.size() != demands.size()) {
    throw ConstructionError("demand set: one demand per group required");
  }
  if (groups.empty()) throw ConstructionError("demand set: at least one group required");
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    if (!(demands[gi] > 0.0) || !std::isfinite(demands[gi])) {
      throw ConstructionError("demand set: demand of group " + std::to_string(gi) +
                              " must be positive");
    }
    if (groups[gi].empty()) {
      throw ConstructionError("demand set: group " + std::to_string(gi) + " is empty");
    }
    channel_count_ += groups[gi].size();
  }
  owner_.assign(channel_count_, groups.size());
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    for (std::size_t c : groups[gi]) {
      if (c >= channel_count_ || owner_[c] != groups.size()) {
        throw ConstructionError("demand set: groups must partition channels 0..C-1");
      }
      owner_[c] = gi;
    }
  }
}

SliceProjection project_demand_slice_scan(std::span<const double> v,
                                          std::span<const double> weights, double demand) {
  validate_slice(v, weights, demand);
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  double a = 0.0;
  double b = 0.0;
  double lambda = 0.0;
  bool found = false;
  for (std::size_t k = 0; k < n; ++k) {
    a += weights[order[k]] * v[order[k]];
    b += weights[order[k]];
    lambda = (a - demand) / b;
    if (k + 1 == n || lambda >= v[order[k + 1]]) {
      found = true;
      break;
    }
  }
  if (!found) return project_demand_slice_bisect(v, weights, demand);
  return finish(v, lambda);
}

SliceProjection project_demand_slice_bisect(std::span<const double> v,
                                            std::span<const double> weights, double demand) {
  validate_slice(v, weights, demand);
  const double total_weight = std::accumulate(weights.begin(), weights.end(), 0.0);
  const auto [vmin, vmax] = std::minmax_element(v.begin(), v.end());
  double lo = *vmin - demand / total_weight;  // phi(lo) >= 0
  double hi = *vmax;                          // phi(hi) = -demand
  while (hi - lo > 1e-12 * std::max(1.0, std::abs(lo) + std::abs(hi))) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (phi(v, weights, demand, mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return finish(v, polish_lambda(v, weights, demand, 0.5 * (lo + hi)));
}

SliceProjection project_demand_slice(std::span<const double> v, std::span<const double> weights,
                                     double demand, bool nonneg) {
  if (!nonneg) {
    validate_slice(v, weights, demand);
    double a = 0.0;
    double b = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      a += weights[i] * v[i];
      b += weights[i];
    }
    SliceProjection out;
    out.lambda = (a - demand) / b;
    out.x.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out.x[i] = v[i] - out.lambda;
    return out;
  }
  return v.size() <= kExactScanLimit ? project_demand_slice_scan(v, weights, demand)
                                     : project_demand_slice_bisect(v, weights, demand);
}

std::pair<std::size_t, std::size_t> set_shape(const FeasibleSet& set) {
  return std::visit(
      overloaded{
          [](const Box& b) { return std::pair{b.lower.channels(), b.lower.bins()}; },
          [](const Ball& b) { return std::pair{b.center.channels(), b.center.bins()}; },
          [](const DemandFlowSet& d) { return std::pair{d.channels(), d.grid.bins()}; },
      },
      set);
}

namespace {

void check_set_shape(const FeasibleSet& set, const HVector& x, const TimeGrid& grid) {
  check_grid(x, grid);
  const auto [c, m] = set_shape(set);
  if (x.channels() != c || x.bins() != m) {
    throw DimensionError("vector shape (" + std::to_string(x.channels()) + "," +
                         std::to_string(x.bins()) + ") does not match set shape (" +
                         std::to_string(c) + "," + std::to_string(m) + ")");
  }
}

ProjectionReport project_demand(const DemandFlowSet& set, const HVector& x,
                                kernels::Exec exec) {
  const std::size_t bins = x.bins();
  ProjectionReport report{HVector(x.channels(), bins), std::vector<double>(set.groups.size()),
                          0.0};
  std::vector<double> residuals(set.groups.size(), 0.0);
  const auto groups = static_cast<std::ptrdiff_t>(set.groups.size());
  const bool parallel =
      exec == kernels::Exec::parallel && x.size() >= kernels::kParallelThreshold;
  const auto project_group = [&](std::ptrdiff_t gi) {
    const auto& channels = set.groups[static_cast<std::size_t>(gi)];
    const double demand = set.demands[static_cast<std::size_t>(gi)];
    std::vector<double> v;
    std::vector<double> w;
    v.reserve(channels.size() * bins);
    w.reserve(channels.size() * bins);
    for (std::size_t c : channels) {
      for (std::size_t i = 0; i < bins; ++i) {
        v.push_back(x(c, i));
        w.push_back(set.grid.weight(i));
      }
    }
    SliceProjection slice = project_demand_slice(v, w, demand, set.nonneg);
    double total = 0.0;
    std::size_t k = 0;
    for (std::size_t c : channels) {
      for (std::size_t i = 0; i < bins; ++i, ++k) {
        report.point(c, i) = slice.x[k];
        total += w[k] * slice.x[k];
      }
    }
    report.multipliers[static_cast<std::size_t>(gi)] = slice.lambda;
    residuals[static_cast<std::size_t>(gi)] = std::abs(total - demand);
  };
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t gi = 0; gi < groups; ++gi) project_group(gi);
  } else {
    for (std::ptrdiff_t gi = 0; gi < groups; ++gi) project_group(gi);
  }
  for (double r : residuals) report.feasibility_residual = std::max(report.feasibility_residual, r);
  return report;
}

}  // namespace

ProjectionReport project(const FeasibleSet& set, const HVector& x, const TimeGrid& grid,
                         kernels::Exec exec) {
  check_set_shape(set, x, grid);
  return std::visit(
      overloaded{
          [&](const Box& b) {
            HVector z = x;
            for (std::size_t k = 0; k < z.size(); ++k) {
              z[k] = std::clamp(z[k], b.lower[k], b.upper[k]);
            }
            return ProjectionReport{std::move(z), {}, 0.0};
          },
          [&](const Ball& b) {
            const double dist = distance(x, b.center, grid);
            if (dist <= b.radius) return ProjectionReport{x, {}, 0.0};
            const double s = b.radius / dist;
            HVector z = combine({1.0 - s, s}, {&b.center, &x});
            const double excess = std::max(0.0, distance(z, b.center, grid) - b.radius);
            return ProjectionReport{std::move(z), {}, excess};
          },
          [&](const DemandFlowSet& d) {
            if (!(d.grid == grid)) throw DimensionError("demand set built on a different grid");
            return project_demand(d, x, exec);
          },
      },
      set);
}

double feasibility_residual(const FeasibleSet& set, const HVector& x, const TimeGrid& grid) {
  check_set_shape(set, x, grid);
  return std::visit(
      overloaded{
          [&](const Box& b) {
            double r = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k) {
              r = std::max({r, b.lower[k] - x[k], x[k] - b.upper[k]});
            }
            return r;
          },
          [&](const Ball& b) { return std::max(0.0, distance(x, b.center, grid) - b.radius); },
          [&](const DemandFlowSet& d) {
            double r = 0.0;
            for (std::size_t gi = 0; gi < d.groups.size(); ++gi) {
              double total = 0.0;
              for (std::size_t c : d.groups[gi]) {
                for (std::size_t i = 0; i < x.bins(); ++i) {
                  total += grid.weight(i) * x(c, i);
                  if (d.nonneg) r = std::max(r, -x(c, i));
                }
              }
              r = std::max(r, std::abs(total - d.demands[gi]));
            }
            return r;
          },
      },
      set);
}

bool contains(const FeasibleSet& set, const HVector& x, const TimeGrid& grid, double tol) {
  return feasibility_residual(set, x, grid) <= tol;
}

HVector sample_feasible(const FeasibleSet& set, const TimeGrid& grid, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto [channels, bins] = set_shape(set);
  HVector draw(channels, bins);
  std::visit(overloaded{
                 [&](const Box& b) {
                   for (std::size_t k = 0; k < draw.size(); ++k) {
                     const double mid = 0.5 * (b.lower[k] + b.upper[k]);
                     const double half = std::max(0.5 * (b.upper[k] - b.lower[k]), 1e-3);
                     draw[k] = mid + half * normal(rng);
                   }
                 },
                 [&](const Ball& b) {
                   const double scale =
                       b.radius / std::sqrt(static_cast<double>(draw.size()) *
                                            (grid.t1() - grid.t0()));
                   for (std::size_t k = 0; k < draw.size(); ++k) {
                     draw[k] = b.center[k] + 1.5 * scale * normal(rng);
                   }
                 },
                 [&](const DemandFlowSet& d) {
                   const double span = grid.t1() - grid.t0();
                   for (std::size_t gi = 0; gi < d.groups.size(); ++gi) {
                     const double mean =
                         d.demands[gi] / (span * static_cast<double>(d.groups[gi].size()));
                     for (std::size_t c : d.groups[gi]) {
                       for (std::size_t i = 0; i < bins; ++i) {
                         draw(c, i) = mean * (1.0 + normal(rng));
                       }
                     }
                   }
                 },
             },
             set);
  return project(set, draw, grid).point;
}

}  // namespace fbfvi
