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

#include "fbfvi/kernels.hpp"

#include <cassert>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fbfvi::kernels {

namespace {

bool use_parallel(Exec exec, std::size_t n) {
  return exec == Exec::parallel && n >= kParallelThreshold;
}

template <typename Term>
double channel_reduce(std::size_t total, std::size_t bins, Exec exec, Term term) {
  const std::size_t channels = bins == 0 ? 0 : total / bins;
  const auto channel_sum = [&](std::size_t c) {
    double s = 0.0;
    const std::size_t base = c * bins;
    for (std::size_t i = 0; i < bins; ++i) s += term(base + i, i);
    return s;
  };
  double sum = 0.0;
  if (!use_parallel(exec, total)) {
    for (std::size_t c = 0; c < channels; ++c) sum += channel_sum(c);
    return sum;
  }
  // Same per-channel partials summed in the same order, so both paths agree bitwise.
  std::vector<double> partial(channels, 0.0);
  const auto n = static_cast<std::ptrdiff_t>(channels);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < n; ++c) {
    partial[static_cast<std::size_t>(c)] = channel_sum(static_cast<std::size_t>(c));
  }
  for (double p : partial) sum += p;
  return sum;
}

}  // namespace

double weighted_dot(std::span<const double> u, std::span<const double> v,
                    std::span<const double> weights, Exec exec) {
  assert(u.size() == v.size());
  return channel_reduce(u.size(), weights.size(), exec, [&](std::size_t k, std::size_t i) {
    return weights[i] * u[k] * v[k];
  });
}

double weighted_sq_distance(std::span<const double> u, std::span<const double> v,
                            std::span<const double> weights, Exec exec) {
  assert(u.size() == v.size());
  return channel_reduce(u.size(), weights.size(), exec, [&](std::size_t k, std::size_t i) {
    const double d = u[k] - v[k];
    return weights[i] * d * d;
  });
}

void linear_combination(std::span<double> out, std::span<const double> coeffs,
                        std::span<const double* const> inputs, Exec exec) {
  assert(coeffs.size() == inputs.size());
  const auto n = static_cast<std::ptrdiff_t>(out.size());
  const std::size_t terms = coeffs.size();
  const auto entry = [&](std::ptrdiff_t k) {
    double s = 0.0;
    for (std::size_t j = 0; j < terms; ++j) s += coeffs[j] * inputs[j][k];
    out[static_cast<std::size_t>(k)] = s;
  };
  if (!use_parallel(exec, out.size())) {
    for (std::ptrdiff_t k = 0; k < n; ++k) entry(k);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) entry(k);
}

void dense_matvec(std::span<double> out, std::span<const double> matrix,
                  std::span<const double> x, Exec exec) {
  const std::size_t cols = x.size();
  assert(matrix.size() == out.size() * cols);
  const auto rows = static_cast<std::ptrdiff_t>(out.size());
  const auto row_dot = [&](std::ptrdiff_t r) {
    const double* row = matrix.data() + static_cast<std::size_t>(r) * cols;
    double s = 0.0;
    for (std::size_t j = 0; j < cols; ++j) s += row[j] * x[j];
    out[static_cast<std::size_t>(r)] = s;
  };
  if (!use_parallel(exec, matrix.size())) {
    for (std::ptrdiff_t r = 0; r < rows; ++r) row_dot(r);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r) row_dot(r);
}

}  // namespace fbfvi::kernels
