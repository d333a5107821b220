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

// Built-in networks. Topologies follow the usual test networks; free-flow
// times, capacities, demands and target arrival times are synthetic.

#include <string>
#include <utility>
#include <vector>

#include "fbfvi/due.hpp"
#include "fbfvi/error.hpp"

namespace fbfvi::due {

namespace {

struct LinkSpec {
  int from;
  int to;
  double free_flow_minutes;
  double capacity;
};

struct OdSpec {
  int origin;
  int destination;
  double demand;
  double target_arrival;
  std::vector<std::vector<int>> paths;  // 1-based link ids
};

Fixture assemble(int node_count, const std::vector<LinkSpec>& links,
                 const std::vector<OdSpec>& ods) {
  Fixture f;
  for (int i = 1; i <= node_count; ++i) f.network.nodes.push_back(std::to_string(i));
  for (std::size_t a = 0; a < links.size(); ++a) {
    const LinkSpec& l = links[a];
    f.network.links.push_back(Link{std::to_string(a + 1), std::to_string(l.from),
                                   std::to_string(l.to), l.free_flow_minutes / 60.0,
                                   l.capacity});
  }
  for (std::size_t w = 0; w < ods.size(); ++w) {
    const OdSpec& od = ods[w];
    f.network.od_pairs.push_back(OdPair{std::to_string(od.origin),
                                        std::to_string(od.destination), od.demand,
                                        od.target_arrival});
    for (const auto& path : od.paths) {
      std::vector<std::size_t> idx;
      for (int id : path) idx.push_back(static_cast<std::size_t>(id - 1));
      f.paths.ids.push_back(std::to_string(f.paths.size() + 1));
      f.paths.links.push_back(std::move(idx));
      f.paths.owner.push_back(w);
    }
  }
  f.network.validate();
  f.paths.validate(f.network);
  return f;
}

Fixture two_path_toy() {
  return assemble(2, {{1, 2, 30.0, 1000.0}, {1, 2, 45.0, 1500.0}},
                  {{1, 2, 800.0, 1.5, {{1}, {2}}}});
}

Fixture nguyen_topology() {
  // 13 nodes, 19 links; o/d pairs 1->2, 1->3, 4->2, 4->3.
  const std::vector<LinkSpec> links = {
      {1, 5, 7, 1200},   {1, 12, 9, 1200},  {4, 5, 9, 1200},   {4, 9, 12, 1200},
      {5, 6, 3, 1800},   {5, 9, 9, 1200},   {6, 7, 5, 1800},   {6, 10, 13, 1200},
      {7, 8, 5, 1200},   {7, 11, 9, 1200},  {8, 2, 9, 1200},   {9, 10, 10, 1800},
      {9, 13, 9, 1200},  {10, 11, 6, 1800}, {11, 2, 9, 1200},  {11, 3, 8, 1200},
      {12, 6, 7, 1200},  {12, 8, 14, 1200}, {13, 3, 11, 1200},
  };
  // The 1->2 walk 2-17-7-10-15 is left out, giving 24 paths.
  const std::vector<OdSpec> ods = {
      {1, 2, 600, 1.5,
       {{1, 5, 7, 9, 11},
        {1, 5, 7, 10, 15},
        {1, 5, 8, 14, 15},
        {1, 6, 12, 14, 15},
        {2, 17, 7, 9, 11},
        {2, 17, 8, 14, 15},
        {2, 18, 11}}},
      {1, 3, 500, 1.5,
       {{1, 5, 7, 10, 16},
        {1, 5, 8, 14, 16},
        {1, 6, 12, 14, 16},
        {1, 6, 13, 19},
        {2, 17, 7, 10, 16},
        {2, 17, 8, 14, 16}}},
      {4, 2, 500, 1.5,
       {{3, 5, 7, 9, 11}, {3, 5, 7, 10, 15}, {3, 5, 8, 14, 15}, {3, 6, 12, 14, 15},
        {4, 12, 14, 15}}},
      {4, 3, 600, 1.5,
       {{3, 5, 7, 10, 16},
        {3, 5, 8, 14, 16},
        {3, 6, 12, 14, 16},
        {3, 6, 13, 19},
        {4, 12, 14, 16},
        {4, 13, 19}}},
  };
  return assemble(13, links, ods);
}

Fixture sioux_topology() {
  // 24 nodes, 76 links. A few o/d pairs with their three shortest
  // free-flow paths, for smoke runs.
  const std::vector<std::pair<int, int>> ends = {
      {1, 2},   {1, 3},   {2, 1},   {2, 6},   {3, 1},   {3, 4},   {3, 12},  {4, 3},
      {4, 5},   {4, 11},  {5, 4},   {5, 6},   {5, 9},   {6, 2},   {6, 5},   {6, 8},
      {7, 8},   {7, 18},  {8, 6},   {8, 7},   {8, 9},   {8, 16},  {9, 5},   {9, 8},
      {9, 10},  {10, 9},  {10, 11}, {10, 15}, {10, 16}, {10, 17}, {11, 4},  {11, 10},
      {11, 12}, {11, 14}, {12, 3},  {12, 11}, {12, 13}, {13, 12}, {13, 24}, {14, 11},
      {14, 15}, {14, 23}, {15, 10}, {15, 14}, {15, 19}, {15, 22}, {16, 8},  {16, 10},
      {16, 17}, {16, 18}, {17, 10}, {17, 16}, {17, 19}, {18, 7},  {18, 16}, {18, 20},
      {19, 15}, {19, 17}, {19, 20}, {20, 18}, {20, 19}, {20, 21}, {20, 22}, {21, 20},
      {21, 22}, {21, 24}, {22, 15}, {22, 20}, {22, 21}, {22, 23}, {23, 14}, {23, 22},
      {23, 24}, {24, 13}, {24, 21}, {24, 23},
  };
  const double minutes[] = {6, 4, 6, 5, 4, 4, 4, 4, 2, 6, 2, 4, 5, 5, 4, 2, 3, 2, 2,
                            3, 10, 5, 5, 10, 3, 3, 5, 6, 4, 8, 6, 5, 6, 5, 4, 6, 3, 3,
                            4, 4, 5, 4, 6, 3, 3, 4, 5, 4, 5, 4, 8, 2, 2, 2, 3, 2, 4,
                            4, 4, 3, 6, 5, 4, 3, 8, 6, 3, 2, 4, 6, 4, 3, 2, 4, 4, 3};
  std::vector<LinkSpec> links;
  for (std::size_t a = 0; a < ends.size(); ++a) {
    links.push_back({ends[a].first, ends[a].second, minutes[a], 1500.0});
  }
  const std::vector<OdSpec> ods = {
      {1, 20, 300, 1.5, {{1, 4, 16, 20, 18, 56}, {2, 7, 37, 39, 75, 64}, {2, 6, 9, 12, 16, 20, 18, 56}}},
      {13, 2, 300, 1.5, {{38, 35, 5, 1}, {38, 35, 6, 9, 12, 14}, {39, 75, 64, 60, 54, 17, 19, 14}}},
      {7, 24, 300, 1.5, {{18, 56, 62, 66}, {18, 56, 63, 70, 73}, {18, 56, 63, 69, 66}}},
  };
  return assemble(24, links, ods);
}

}  // namespace

Fixture fixture(const std::string& name) {
  if (name == "two_path_toy") return two_path_toy();
  if (name == "nguyen_topology") return nguyen_topology();
  if (name == "sioux_topology") return sioux_topology();
  throw ConstructionError("unknown fixture: " + name);
}

const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names = {"two_path_toy", "nguyen_topology",
                                                 "sioux_topology"};
  return names;
}

}  // namespace fbfvi::due
