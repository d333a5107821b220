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

// Serial reference vs OpenMP kernels. Run with OMP_NUM_THREADS to vary the
// team size; below kParallelThreshold both variants take the serial path.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "fbfvi/kernels.hpp"
#include "fbfvi/sets.hpp"

using fbfvi::kernels::Exec;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

Exec exec_of(const benchmark::State& state) {
  return state.range(1) == 0 ? Exec::serial : Exec::parallel;
}

void BM_WeightedDot(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t bins = 64;
  const auto u = random_vector(n, 1);
  const auto v = random_vector(n, 2);
  const std::vector<double> w(bins, 1.0 / bins);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fbfvi::kernels::weighted_dot(u, v, w, exec_of(state)));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * 2 * n * sizeof(double)));
}

void BM_LinearCombination(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_vector(n, 1);
  const auto b = random_vector(n, 2);
  const auto c = random_vector(n, 3);
  std::vector<double> out(n);
  const std::vector<double> coeffs = {0.25, 0.5, 0.25};
  const std::vector<const double*> inputs = {a.data(), b.data(), c.data()};
  for (auto _ : state) {
    fbfvi::kernels::linear_combination(out, coeffs, inputs, exec_of(state));
    benchmark::ClobberMemory();
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * 4 * n * sizeof(double)));
}

void BM_DenseMatvec(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto m = random_vector(d * d, 1);
  const auto x = random_vector(d, 2);
  std::vector<double> out(d);
  for (auto _ : state) {
    fbfvi::kernels::dense_matvec(out, m, x, exec_of(state));
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * d * d));
}

void BM_DemandProjection(benchmark::State& state) {
  const auto groups = static_cast<std::size_t>(state.range(0));
  const std::size_t per_group = 8;
  const std::size_t bins = 64;
  const auto grid = fbfvi::TimeGrid::uniform(0.0, 2.0, bins);
  std::vector<std::vector<std::size_t>> members(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    for (std::size_t k = 0; k < per_group; ++k) members[g].push_back(g * per_group + k);
  }
  const fbfvi::FeasibleSet set =
      fbfvi::DemandFlowSet(members, std::vector<double>(groups, 100.0), grid, true);
  fbfvi::HVector x(groups * per_group, bins, random_vector(groups * per_group * bins, 4));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fbfvi::project(set, x, grid, exec_of(state)).point.data().data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * x.size()));
}

}  // namespace

BENCHMARK(BM_WeightedDot)->ArgsProduct({{1 << 12, 1 << 16, 1 << 20}, {0, 1}});
BENCHMARK(BM_LinearCombination)->ArgsProduct({{1 << 12, 1 << 16, 1 << 20}, {0, 1}});
BENCHMARK(BM_DenseMatvec)->ArgsProduct({{256, 1152, 2048}, {0, 1}});
BENCHMARK(BM_DemandProjection)->ArgsProduct({{4, 64, 512}, {0, 1}});

BENCHMARK_MAIN();
