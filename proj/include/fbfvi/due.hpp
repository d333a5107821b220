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

// Dynamic user equilibrium as a variational inequality over path departure
// rates: networks and paths, delay operators, the effective delay with an
// arrival-time penalty, and equilibrium gap metrics.

#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fbfvi/operators.hpp"
#include "fbfvi/sets.hpp"
#include "fbfvi/space.hpp"

namespace fbfvi::due {

struct Link {
  std::string id;
  std::string from;
  std::string to;
  double free_flow_time = 0.0;  // hours
  double capacity = 0.0;        // vehicles / hour
};

struct OdPair {
  std::string origin;
  std::string destination;
  double demand = 0.0;          // vehicles
  double target_arrival = 0.0;  // hours
};

struct Network {
  std::vector<std::string> nodes;
  std::vector<Link> links;
  std::vector<OdPair> od_pairs;

  // Throws ConstructionError on dangling endpoints, duplicate ids or
  // non-positive parameters.
  void validate() const;
  std::size_t link_index(const std::string& id) const;
};

struct PathSet {
  std::vector<std::string> ids;
  std::vector<std::vector<std::size_t>> links;  // link indices, in travel order
  std::vector<std::size_t> owner;               // o/d pair index per path

  std::size_t size() const { return links.size(); }
  // Path indices per o/d pair.
  std::vector<std::vector<std::size_t>> groups(std::size_t od_count) const;
  // Each path must be a connected walk from its pair's origin to its
  // destination visiting no node twice; every pair must own a path.
  void validate(const Network& network) const;
};

// D_p(t, h) = d0_p + sum_{q, j} K[(p, i), (q, j)] w_j h_q(t_j)
struct AffineKernel {
  std::vector<double> free_flow;  // d0 per path, hours
  std::vector<double> kernel;     // (P * M) x (P * M) row-major, entries >= 0
};

// Vickrey point queues on every link, simulated on cumulative curves with
// `substeps` steps per bin (refined further if a link's free-flow time is
// shorter than a step).
struct PointQueue {
  std::size_t substeps = 4;
};

using DelayModel = std::variant<AffineKernel, PointQueue>;

// rho(x) = c * max(0, x)^q
struct Penalty {
  double coefficient = 0.0;
  int exponent = 2;

  double operator()(double slack) const;
  void validate() const;
};

// Shape g of the time coupling, normalized to unit integral:
//   exponential: exp(-|s| / b) / (2 b)
//   gaussian:    exp(-s^2 / (2 b^2)) / (b sqrt(2 pi))
// Both have positive Fourier transforms, so the kernel below is PSD.
enum class TimeProfile { exponential, gaussian };

TimeProfile parse_time_profile(const std::string& name);
std::string to_string(TimeProfile profile);

// Kernel coupling paths through shared links: for link a with free-flow
// time f_a and capacity c_a, flow on any path using a adds
// f_a / c_a * g(t_i - t_j) to the delay of every path using a, where g has
// the given bandwidth b (hours). Symmetric PSD with nonnegative entries.
// Free-flow delays are path free-flow times.
AffineKernel synthetic_affine_kernel(const Network& network, const PathSet& paths,
                                     const TimeGrid& grid, double bandwidth = 0.25,
                                     TimeProfile profile = TimeProfile::exponential);

// Upper bound on the Lipschitz constant of h -> D(h) in the weighted norm.
double affine_lipschitz_bound(const AffineKernel& model, const TimeGrid& grid);

// Cumulative-curve state of one link over the simulation steps.
struct LinkCurves {
  std::vector<double> inflow;   // U_a(t_n), cumulative vehicles entered
  std::vector<double> outflow;  // V_a(t_n), cumulative vehicles exited
  std::vector<double> arrival;  // U_a(t_n - free_flow), vehicles at the bottleneck
};

struct LoadingResult {
  HVector delays;  // D_p at bin midpoints
  double step = 0.0;
  double start = 0.0;
  std::vector<LinkCurves> links;

  double time(std::size_t n) const { return start + step * static_cast<double>(n); }
  std::size_t steps() const { return links.empty() ? 0 : links.front().inflow.size(); }
  double queue(std::size_t link, std::size_t n) const {
    return links[link].arrival[n] - links[link].outflow[n];
  }
  // Time a vehicle entering `link` at time s leaves it.
  double link_exit_time(const Network& network, std::size_t link, double s) const;
  // Time a vehicle departing on path p at time t reaches the destination.
  double path_exit_time(const Network& network, const PathSet& paths, std::size_t p,
                        double t) const;
};

// Point-queue network loading. Throws DomainError on negative inflow.
LoadingResult load_point_queue(const Network& network, const PathSet& paths, const HVector& h,
                               const TimeGrid& grid, std::size_t substeps = 4);

// Path travel times D(h) at bin midpoints.
HVector path_delays(const DelayModel& model, const Network& network, const PathSet& paths,
                    const HVector& h, const TimeGrid& grid);

// Psi_p(t, h) = D_p(t, h) + rho(t + D_p(t, h) - T_A(w(p)))
HVector effective_delay(const DelayModel& model, const Penalty& penalty, const Network& network,
                        const PathSet& paths, const HVector& h, const TimeGrid& grid);

struct MinCosts {
  std::vector<double> per_path;  // nu_p: min over bins of Psi_p
  std::vector<double> per_od;    // nu_w: min over the pair's paths
};

MinCosts min_costs(const HVector& psi, const std::vector<std::size_t>& owner,
                   std::size_t od_count);

// Max minus min of Psi over supported (p, t) in each pair, where supported
// means h_p(t) > threshold. Empty support gives std::nullopt for the pair.
std::vector<std::optional<double>> od_gap(const HVector& h, const HVector& psi,
                                          const std::vector<std::size_t>& owner,
                                          std::size_t od_count, double threshold);

// Largest relative excess (Psi_p(t) - nu_w) / nu_w over supported (p, t).
double support_violation(const HVector& h, const HVector& psi,
                         const std::vector<std::size_t>& owner, std::size_t od_count,
                         double threshold);

// Clamp statistics of the point-queue operator at infeasible queries.
struct ClampLog {
  std::mutex mutex;
  std::size_t clamped_calls = 0;
  double max_clamp = 0.0;    // largest negative magnitude removed
  double total_clamp = 0.0;  // sum over calls of the weighted mass removed
};

struct DueProblem {
  VIProblem problem;
  std::shared_ptr<ClampLog> clamp_log;  // null for the affine model
};

// VI(Lambda, Psi). The affine model accepts negative flows as is; the point
// queue model clamps them to zero and records the clamp in the log.
DueProblem build_due_problem(const Network& network, const PathSet& paths,
                             const DelayModel& model, const Penalty& penalty,
                             const TimeGrid& grid, bool nonneg = true);

// Demand spread evenly over each pair's paths and the horizon.
HVector uniform_flow(const Network& network, const PathSet& paths, const TimeGrid& grid);

struct Fixture {
  Network network;
  PathSet paths;
};

// two_path_toy, nguyen_topology, sioux_topology. Link parameters are
// synthetic.
Fixture fixture(const std::string& name);
const std::vector<std::string>& fixture_names();

// Comma-separated files with a header line; '#' starts a comment.
//   nodes: id
//   links: id,from,to,free_flow_time,capacity
//   od:    origin,destination,demand,target_arrival
//   paths: path_id,od_index,link_id:link_id:...
Fixture read_network(const std::filesystem::path& nodes, const std::filesystem::path& links,
                     const std::filesystem::path& od, const std::filesystem::path& paths);
void write_network(const Fixture& fixture, const std::filesystem::path& directory);

}  // namespace fbfvi::due
