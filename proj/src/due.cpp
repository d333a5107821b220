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

#include "fbfvi/due.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <string>

#include "fbfvi/error.hpp"
#include "fbfvi/kernels.hpp"

namespace fbfvi::due {

void Network::validate() const {
  std::set<std::string> node_ids(nodes.begin(), nodes.end());
  if (node_ids.size() != nodes.size()) throw ConstructionError("network: duplicate node id");
  std::set<std::string> link_ids;
  for (const Link& link : links) {
    if (!link_ids.insert(link.id).second) {
      throw ConstructionError("network: duplicate link id " + link.id);
    }
    if (!node_ids.contains(link.from) || !node_ids.contains(link.to)) {
      throw ConstructionError("network: link " + link.id + " has an unknown endpoint");
    }
    if (!(link.free_flow_time > 0.0) || !std::isfinite(link.free_flow_time)) {
      throw ConstructionError("network: link " + link.id + " needs free_flow_time > 0");
    }
    if (!(link.capacity > 0.0) || !std::isfinite(link.capacity)) {
      throw ConstructionError("network: link " + link.id + " needs capacity > 0");
    }
  }
  if (od_pairs.empty()) throw ConstructionError("network: no o/d pairs");
  for (const OdPair& od : od_pairs) {
    if (!node_ids.contains(od.origin) || !node_ids.contains(od.destination)) {
      throw ConstructionError("network: o/d pair references an unknown node");
    }
    if (!(od.demand > 0.0) || !std::isfinite(od.demand)) {
      throw ConstructionError("network: o/d demand must be positive");
    }
    if (!std::isfinite(od.target_arrival)) {
      throw ConstructionError("network: o/d target arrival must be finite");
    }
  }
}

std::size_t Network::link_index(const std::string& id) const {
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (links[i].id == id) return i;
  }
  throw ConstructionError("network: unknown link id " + id);
}

std::vector<std::vector<std::size_t>> PathSet::groups(std::size_t od_count) const {
  std::vector<std::vector<std::size_t>> out(od_count);
  for (std::size_t p = 0; p < owner.size(); ++p) {
    if (owner[p] >= od_count) throw ConstructionError("path set: owner index out of range");
    out[owner[p]].push_back(p);
  }
  return out;
}

void PathSet::validate(const Network& network) const {
  if (links.size() != owner.size() || (!ids.empty() && ids.size() != links.size())) {
    throw ConstructionError("path set: inconsistent lengths");
  }
  for (std::size_t p = 0; p < links.size(); ++p) {
    const std::string name = ids.empty() ? std::to_string(p) : ids[p];
    if (owner[p] >= network.od_pairs.size()) {
      throw ConstructionError("path " + name + ": unknown o/d index");
    }
    if (links[p].empty()) throw ConstructionError("path " + name + " is empty");
    const OdPair& od = network.od_pairs[owner[p]];
    std::set<std::string> visited{od.origin};
    std::string at = od.origin;
    for (std::size_t a : links[p]) {
      if (a >= network.links.size()) throw ConstructionError("path " + name + ": bad link");
      const Link& link = network.links[a];
      if (link.from != at) {
        throw ConstructionError("path " + name + " is not connected at link " + link.id);
      }
      if (!visited.insert(link.to).second) {
        throw ConstructionError("path " + name + " revisits node " + link.to);
      }
      at = link.to;
    }
    if (at != od.destination) {
      throw ConstructionError("path " + name + " does not end at its destination");
    }
  }
  const auto g = groups(network.od_pairs.size());
  for (std::size_t w = 0; w < g.size(); ++w) {
    if (g[w].empty()) {
      throw ConstructionError("o/d pair " + std::to_string(w) + " owns no path");
    }
  }
}

double Penalty::operator()(double slack) const {
  if (slack <= 0.0) return 0.0;
  return exponent == 1 ? coefficient * slack : coefficient * slack * slack;
}

void Penalty::validate() const {
  if (!(coefficient >= 0.0) || !std::isfinite(coefficient)) {
    throw ConstructionError("penalty coefficient must be >= 0");
  }
  if (exponent != 1 && exponent != 2) throw ConstructionError("penalty exponent must be 1 or 2");
}

TimeProfile parse_time_profile(const std::string& name) {
  if (name == "exponential") return TimeProfile::exponential;
  if (name == "gaussian") return TimeProfile::gaussian;
  throw ConstructionError("unknown time profile: " + name);
}

std::string to_string(TimeProfile profile) {
  return profile == TimeProfile::exponential ? "exponential" : "gaussian";
}

AffineKernel synthetic_affine_kernel(const Network& network, const PathSet& paths,
                                     const TimeGrid& grid, double bandwidth,
                                     TimeProfile profile) {
  if (!(bandwidth > 0.0)) throw ConstructionError("kernel bandwidth must be positive");
  const std::size_t np = paths.size();
  const std::size_t m = grid.bins();
  // Path-path coupling A = Delta^T diag(f / c) Delta over shared links.
  std::vector<double> coupling(np * np, 0.0);
  for (std::size_t p = 0; p < np; ++p) {
    for (std::size_t q = 0; q < np; ++q) {
      double s = 0.0;
      for (std::size_t a : paths.links[p]) {
        if (std::find(paths.links[q].begin(), paths.links[q].end(), a) != paths.links[q].end()) {
          s += network.links[a].free_flow_time / network.links[a].capacity;
        }
      }
      coupling[p * np + q] = s;
    }
  }
  std::vector<double> time_kernel(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double dt = grid.bin_mid(i) - grid.bin_mid(j);
      time_kernel[i * m + j] =
          profile == TimeProfile::exponential
              ? std::exp(-std::abs(dt) / bandwidth) / (2.0 * bandwidth)
              : std::exp(-0.5 * dt * dt / (bandwidth * bandwidth)) /
                    (bandwidth * std::sqrt(2.0 * std::numbers::pi));
    }
  }
  AffineKernel model;
  model.free_flow.resize(np);
  for (std::size_t p = 0; p < np; ++p) {
    double f = 0.0;
    for (std::size_t a : paths.links[p]) f += network.links[a].free_flow_time;
    model.free_flow[p] = f;
  }
  const std::size_t n = np * m;
  model.kernel.assign(n * n, 0.0);
  for (std::size_t p = 0; p < np; ++p) {
    for (std::size_t q = 0; q < np; ++q) {
      const double a = coupling[p * np + q];
      if (a == 0.0) continue;
      for (std::size_t i = 0; i < m; ++i) {
        double* row = model.kernel.data() + (p * m + i) * n + q * m;
        for (std::size_t j = 0; j < m; ++j) row[j] = a * time_kernel[i * m + j];
      }
    }
  }
  return model;
}

double affine_lipschitz_bound(const AffineKernel& model, const TimeGrid& grid) {
  const std::size_t m = grid.bins();
  const std::size_t n = model.free_flow.size() * m;
  if (model.kernel.size() != n * n) throw DimensionError("affine kernel has the wrong size");
  // ||W^{1/2} K W^{1/2}||_2 <= sqrt(max row sum * max column sum).
  std::vector<double> row_sum(n, 0.0);
  std::vector<double> col_sum(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const double wr = std::sqrt(grid.weight(r % m));
    for (std::size_t s = 0; s < n; ++s) {
      const double v = std::abs(model.kernel[r * n + s]) * wr * std::sqrt(grid.weight(s % m));
      row_sum[r] += v;
      col_sum[s] += v;
    }
  }
  const double rmax = *std::max_element(row_sum.begin(), row_sum.end());
  const double cmax = *std::max_element(col_sum.begin(), col_sum.end());
  return std::sqrt(rmax * cmax);
}

namespace {

void check_flow_shape(const PathSet& paths, const HVector& h, const TimeGrid& grid) {
  check_grid(h, grid);
  if (h.channels() != paths.size()) {
    throw DimensionError("flow profile has " + std::to_string(h.channels()) +
                         " channels for " + std::to_string(paths.size()) + " paths");
  }
}

HVector affine_delays(const AffineKernel& model, const HVector& h, const TimeGrid& grid) {
  const std::size_t m = grid.bins();
  const std::size_t n = h.size();
  if (model.free_flow.size() != h.channels() || model.kernel.size() != n * n) {
    throw DimensionError("affine kernel does not match the flow profile");
  }
  std::vector<double> weighted(n);
  for (std::size_t k = 0; k < n; ++k) weighted[k] = grid.weight(k % m) * h[k];
  HVector d(h.channels(), m);
  kernels::dense_matvec(d.data(), model.kernel, weighted);
  for (std::size_t p = 0; p < h.channels(); ++p) {
    for (std::size_t i = 0; i < m; ++i) d(p, i) += model.free_flow[p];
  }
  return d;
}

struct OperatorState {
  Network network;
  PathSet paths;
  DelayModel model;
  Penalty penalty;
  TimeGrid grid;
};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

HVector path_delays(const DelayModel& model, const Network& network, const PathSet& paths,
                    const HVector& h, const TimeGrid& grid) {
  check_flow_shape(paths, h, grid);
  return std::visit(overloaded{
                        [&](const AffineKernel& k) { return affine_delays(k, h, grid); },
                        [&](const PointQueue& q) {
                          return load_point_queue(network, paths, h, grid, q.substeps).delays;
                        },
                    },
                    model);
}

HVector effective_delay(const DelayModel& model, const Penalty& penalty, const Network& network,
                        const PathSet& paths, const HVector& h, const TimeGrid& grid) {
  HVector psi = path_delays(model, network, paths, h, grid);
  if (penalty.coefficient == 0.0) return psi;
  for (std::size_t p = 0; p < psi.channels(); ++p) {
    const double target = network.od_pairs[paths.owner[p]].target_arrival;
    for (std::size_t i = 0; i < psi.bins(); ++i) {
      const double d = psi(p, i);
      psi(p, i) = d + penalty(grid.bin_mid(i) + d - target);
    }
  }
  return psi;
}

MinCosts min_costs(const HVector& psi, const std::vector<std::size_t>& owner,
                   std::size_t od_count) {
  if (owner.size() != psi.channels()) throw DimensionError("min_costs: owner size mismatch");
  MinCosts out;
  out.per_path.assign(psi.channels(), std::numeric_limits<double>::infinity());
  out.per_od.assign(od_count, std::numeric_limits<double>::infinity());
  for (std::size_t p = 0; p < psi.channels(); ++p) {
    for (double v : psi.channel(p)) out.per_path[p] = std::min(out.per_path[p], v);
    out.per_od[owner[p]] = std::min(out.per_od[owner[p]], out.per_path[p]);
  }
  return out;
}

std::vector<std::optional<double>> od_gap(const HVector& h, const HVector& psi,
                                          const std::vector<std::size_t>& owner,
                                          std::size_t od_count, double threshold) {
  check_same_shape(h, psi);
  if (owner.size() != h.channels()) throw DimensionError("od_gap: owner size mismatch");
  std::vector<double> hi(od_count, -std::numeric_limits<double>::infinity());
  std::vector<double> lo(od_count, std::numeric_limits<double>::infinity());
  for (std::size_t p = 0; p < h.channels(); ++p) {
    for (std::size_t i = 0; i < h.bins(); ++i) {
      if (h(p, i) > threshold) {
        hi[owner[p]] = std::max(hi[owner[p]], psi(p, i));
        lo[owner[p]] = std::min(lo[owner[p]], psi(p, i));
      }
    }
  }
  std::vector<std::optional<double>> gaps(od_count);
  for (std::size_t w = 0; w < od_count; ++w) {
    if (lo[w] <= hi[w]) gaps[w] = hi[w] - lo[w];
  }
  return gaps;
}

double support_violation(const HVector& h, const HVector& psi,
                         const std::vector<std::size_t>& owner, std::size_t od_count,
                         double threshold) {
  check_same_shape(h, psi);
  const MinCosts nu = min_costs(psi, owner, od_count);
  double worst = 0.0;
  for (std::size_t p = 0; p < h.channels(); ++p) {
    const double base = nu.per_od[owner[p]];
    for (std::size_t i = 0; i < h.bins(); ++i) {
      if (h(p, i) > threshold) worst = std::max(worst, (psi(p, i) - base) / std::abs(base));
    }
  }
  return worst;
}

DueProblem build_due_problem(const Network& network, const PathSet& paths,
                             const DelayModel& model, const Penalty& penalty,
                             const TimeGrid& grid, bool nonneg) {
  network.validate();
  paths.validate(network);
  penalty.validate();
  std::vector<double> demands;
  for (const OdPair& od : network.od_pairs) demands.push_back(od.demand);
  DemandFlowSet set(paths.groups(network.od_pairs.size()), std::move(demands), grid, nonneg);

  // Shared so that copies of the problem do not copy the kernel.
  const auto state = std::make_shared<const OperatorState>(
      OperatorState{network, paths, model, penalty, grid});
  DueProblem out{VIProblem{"due", {}, std::move(set), grid, std::nullopt, std::nullopt}, nullptr};
  if (const auto* affine = std::get_if<AffineKernel>(&model)) {
    const std::size_t n = paths.size() * grid.bins();
    if (affine->free_flow.size() != paths.size() || affine->kernel.size() != n * n) {
      throw ConstructionError("affine kernel does not match paths and grid");
    }
    for (double v : affine->kernel) {
      if (v < 0.0) throw ConstructionError("affine kernel entries must be nonnegative");
    }
    for (double v : affine->free_flow) {
      if (!(v > 0.0)) throw ConstructionError("affine free-flow delays must be positive");
    }
    // Global bound only when the penalty is itself globally Lipschitz.
    if (penalty.coefficient == 0.0 || penalty.exponent == 1) {
      out.problem.lipschitz_hint =
          affine_lipschitz_bound(*affine, grid) * (1.0 + penalty.coefficient);
    }
    out.problem.op = [state](const HVector& h) {
      return effective_delay(state->model, state->penalty, state->network, state->paths, h,
                             state->grid);
    };
  } else {
    auto log = std::make_shared<ClampLog>();
    out.clamp_log = log;
    out.problem.op = [state, log](const HVector& h) {
      const TimeGrid& grid = state->grid;
      HVector clamped = h;
      double worst = 0.0;
      double mass = 0.0;
      for (std::size_t k = 0; k < clamped.size(); ++k) {
        if (clamped[k] < 0.0) {
          worst = std::max(worst, -clamped[k]);
          mass += -clamped[k] * grid.weight(k % grid.bins());
          clamped[k] = 0.0;
        }
      }
      if (worst > 0.0) {
        std::lock_guard lock(log->mutex);
        ++log->clamped_calls;
        log->max_clamp = std::max(log->max_clamp, worst);
        log->total_clamp += mass;
      }
      return effective_delay(state->model, state->penalty, state->network, state->paths,
                             clamped, grid);
    };
  }
  return out;
}

HVector uniform_flow(const Network& network, const PathSet& paths, const TimeGrid& grid) {
  const auto g = paths.groups(network.od_pairs.size());
  HVector h(paths.size(), grid.bins());
  const double span = grid.t1() - grid.t0();
  for (std::size_t w = 0; w < g.size(); ++w) {
    const double rate = network.od_pairs[w].demand / (span * static_cast<double>(g[w].size()));
    for (std::size_t p : g[w]) {
      for (std::size_t i = 0; i < grid.bins(); ++i) h(p, i) = rate;
    }
  }
  return h;
}

}  // namespace fbfvi::due
