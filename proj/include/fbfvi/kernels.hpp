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

// Data-parallel inner loops. Every kernel has a serial reference and an
// OpenMP version; both perform the same floating-point operations in the
// same order per output, so results are bitwise identical for any thread
// count.

#include <cstddef>
#include <span>

namespace fbfvi::kernels {

enum class Exec { serial, parallel };

// Below this many entries the parallel path falls back to serial.
inline constexpr std::size_t kParallelThreshold = 1 << 14;

// sum_c sum_i w_i u(c,i) v(c,i) over a (channels x bins) row-major layout.
// Per-channel partial sums are reduced in channel order.
double weighted_dot(std::span<const double> u, std::span<const double> v,
                    std::span<const double> weights, Exec exec = Exec::parallel);

// sum_c sum_i w_i (u(c,i) - v(c,i))^2
double weighted_sq_distance(std::span<const double> u, std::span<const double> v,
                            std::span<const double> weights, Exec exec = Exec::parallel);

// out = sum_j coeffs[j] * inputs[j]
void linear_combination(std::span<double> out, std::span<const double> coeffs,
                        std::span<const double* const> inputs, Exec exec = Exec::parallel);

// out = A x with A dense row-major (rows x cols).
void dense_matvec(std::span<double> out, std::span<const double> matrix,
                  std::span<const double> x, Exec exec = Exec::parallel);

}  // namespace fbfvi::kernels
