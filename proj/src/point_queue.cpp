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

// Vickrey point-queue loading on cumulative curves.
//
// Each link a has a free-flow segment of length f_a followed by a point
// bottleneck of capacity c_a. With U_a the cumulative inflow, the cumulative
// arrival at the bottleneck is A_a(t) = U_a(t - f_a) and the cumulative
// outflow obeys V_a(t + dt) = min(A_a(t + dt), V_a(t) + c_a dt). A vehicle
// reaching the bottleneck at r = s + f_a leaves at r + (A_a(r) - V_a(r)) / c_a;
// both curves are read on the same grid, so an empty queue costs exactly f_a.
// Flow is passed downstream path by path in FIFO order.

#include <algorithm>
#include <cmath>
#include <string>

#include "fbfvi/due.hpp"
#include "fbfvi/error.hpp"

namespace fbfvi::due {

namespace {

// Piecewise-linear interpolation of a curve sampled at start + n * step;
// constant extrapolation on both sides.
double sample(const std::vector<double>& curve, double start, double step, double t) {
  const double pos = (t - start) / step;
  if (pos <= 0.0) return curve.front();
  const auto last = curve.size() - 1;
  if (pos >= static_cast<double>(last)) return curve.back();
  const auto n = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(n);
  return curve[n] + frac * (curve[n + 1] - curve[n]);
}

constexpr std::size_t kMaxSteps = 50'000'000;

}  // namespace

double LoadingResult::link_exit_time(const Network& network, std::size_t link, double s) const {
  const Link& l = network.links[link];
  const LinkCurves& c = links[link];
  const double r = s + l.free_flow_time;
  const double ahead = sample(c.arrival, start, step, r) - sample(c.outflow, start, step, r);
  return r + std::max(0.0, ahead) / l.capacity;
}

double LoadingResult::path_exit_time(const Network& network, const PathSet& paths,
                                     std::size_t p, double t) const {
  double s = t;
  for (std::size_t a : paths.links[p]) s = link_exit_time(network, a, s);
  return s;
}

LoadingResult load_point_queue(const Network& network, const PathSet& paths, const HVector& h,
                               const TimeGrid& grid, std::size_t substeps) {
  check_grid(h, grid);
  if (h.channels() != paths.size()) {
    throw DimensionError("point queue: flow profile does not match the path set");
  }
  if (!grid.is_uniform()) throw DomainError("point queue: grid must be uniform");
  if (substeps == 0) throw DomainError("point queue: substeps must be positive");
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (h[k] < 0.0) {
      throw DomainError("point queue: negative inflow " + std::to_string(h[k]) + " on path " +
                        std::to_string(k / h.bins()) + ", bin " + std::to_string(k % h.bins()));
    }
  }

  const std::size_t bins = grid.bins();
  const double width = grid.weight(0);
  double min_free_flow = width;
  for (const Link& l : network.links) min_free_flow = std::min(min_free_flow, l.free_flow_time);
  // A step no longer than any free-flow time keeps A_a(t_n) a function of
  // already computed inflows.
  const auto per_bin = std::max<std::size_t>(
      substeps, static_cast<std::size_t>(std::ceil(width / min_free_flow - 1e-12)));
  const double step = width / static_cast<double>(per_bin);
  const std::size_t departure_steps = bins * per_bin;

  LoadingResult result;
  result.step = step;
  result.start = grid.t0();
  result.links.resize(network.links.size());
  for (LinkCurves& c : result.links) {
    c.inflow.assign(1, 0.0);
    c.outflow.assign(1, 0.0);
    c.arrival.assign(1, 0.0);
  }

  // entered[p][j]: cumulative vehicles of path p entering its j-th link.
  std::vector<std::vector<std::vector<double>>> entered(paths.size());
  for (std::size_t p = 0; p < paths.size(); ++p) {
    entered[p].assign(paths.links[p].size(), std::vector<double>(1, 0.0));
  }
  // Search cursor into U_a for the FIFO inversion U_a(s) = V_a(t_n).
  std::vector<std::size_t> cursor(network.links.size(), 0);

  double total = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) total += h[k] * width;

  std::vector<double> departed(paths.size(), 0.0);
  for (std::size_t n = 1;; ++n) {
    if (n > kMaxSteps) throw DomainError("point queue: network did not clear");
    const double t = grid.t0() + step * static_cast<double>(n);

    for (std::size_t a = 0; a < network.links.size(); ++a) {
      LinkCurves& c = result.links[a];
      const Link& l = network.links[a];
      const double arrived = sample(c.inflow, result.start, step, t - l.free_flow_time);
      const double out = std::min(arrived, c.outflow.back() + l.capacity * step);
      c.arrival.push_back(arrived);
      c.outflow.push_back(std::max(out, c.outflow.back()));
    }

    for (std::size_t p = 0; p < paths.size(); ++p) {
      if (n <= departure_steps) departed[p] += h(p, (n - 1) / per_bin) * step;
      entered[p][0].push_back(departed[p]);
      for (std::size_t j = 1; j < paths.links[p].size(); ++j) {
        const std::size_t up = paths.links[p][j - 1];
        const LinkCurves& c = result.links[up];
        const double exited = c.outflow.back();
        // First m with U(m) >= V(t_n); U is known up to n - 1.
        std::size_t m = cursor[up];
        while (m < n - 1 && c.inflow[m] < exited) ++m;
        const std::vector<double>& mine = entered[p][j - 1];
        double value;
        if (m == 0 || c.inflow[m] <= c.inflow[m - 1]) {
          value = mine[m];
        } else {
          const double frac = std::clamp(
              (exited - c.inflow[m - 1]) / (c.inflow[m] - c.inflow[m - 1]), 0.0, 1.0);
          value = mine[m - 1] + frac * (mine[m] - mine[m - 1]);
        }
        entered[p][j].push_back(std::max(value, entered[p][j].back()));
      }
    }
    // Cursors advance only after every path has read them at this step.
    for (std::size_t a = 0; a < network.links.size(); ++a) {
      const LinkCurves& c = result.links[a];
      std::size_t& m = cursor[a];
      while (m < n - 1 && c.inflow[m] < c.outflow.back()) ++m;
      m = m > 0 ? m - 1 : 0;
    }

    for (LinkCurves& c : result.links) c.inflow.push_back(0.0);
    for (std::size_t p = 0; p < paths.size(); ++p) {
      for (std::size_t j = 0; j < paths.links[p].size(); ++j) {
        result.links[paths.links[p][j]].inflow.back() += entered[p][j].back();
      }
    }

    if (n >= departure_steps) {
      double in_network = 0.0;
      for (const LinkCurves& c : result.links) in_network += c.inflow.back() - c.outflow.back();
      if (in_network <= 1e-12 * std::max(1.0, total)) break;
    }
  }

  result.delays = HVector(paths.size(), bins);
  for (std::size_t p = 0; p < paths.size(); ++p) {
    for (std::size_t i = 0; i < bins; ++i) {
      const double t = grid.bin_mid(i);
      result.delays(p, i) = result.path_exit_time(network, paths, p, t) - t;
    }
  }
  return result;
}

}  // namespace fbfvi::due
