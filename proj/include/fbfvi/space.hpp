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

// Discretized L2([t0, t1]; R^C): piecewise-constant functions on a
// quadrature grid with a weighted inner product.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace fbfvi {

class TimeGrid {
 public:
  // M uniform bins of width (t1 - t0) / M.
  static TimeGrid uniform(double t0, double t1, std::size_t bins);
  // Explicit positive weights; they must sum to t1 - t0.
  static TimeGrid from_weights(double t0, double t1, std::vector<double> weights);
  // The grid used by finite-dimensional problems: [0, 1] with one unit bin,
  // so that the inner product reduces to the Euclidean one.
  static TimeGrid unit() { return uniform(0.0, 1.0, 1); }

  double t0() const { return t0_; }
  double t1() const { return t1_; }
  std::size_t bins() const { return weights_.size(); }
  std::span<const double> weights() const { return weights_; }
  double weight(std::size_t i) const { return weights_[i]; }

  // Left edge and midpoint of bin i.
  double bin_start(std::size_t i) const { return starts_[i]; }
  double bin_mid(std::size_t i) const { return starts_[i] + 0.5 * weights_[i]; }

  bool is_uniform() const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  TimeGrid(double t0, double t1, std::vector<double> weights);

  double t0_;
  double t1_;
  std::vector<double> weights_;
  std::vector<double> starts_;
};

// Dense (channel, bin) array, row-major by channel.
class HVector {
 public:
  HVector() = default;
  HVector(std::size_t channels, std::size_t bins, double value = 0.0);
  HVector(std::size_t channels, std::size_t bins, std::vector<double> data);

  // Column vector in R^d, represented as d channels of one bin.
  static HVector from_values(std::initializer_list<double> values);
  static HVector from_values(std::vector<double> values);

  std::size_t channels() const { return channels_; }
  std::size_t bins() const { return bins_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t c, std::size_t i) { return data_[c * bins_ + i]; }
  double operator()(std::size_t c, std::size_t i) const { return data_[c * bins_ + i]; }
  double& operator[](std::size_t k) { return data_[k]; }
  double operator[](std::size_t k) const { return data_[k]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::span<double> channel(std::size_t c) { return {data_.data() + c * bins_, bins_}; }
  std::span<const double> channel(std::size_t c) const {
    return {data_.data() + c * bins_, bins_};
  }

  bool same_shape(const HVector& other) const {
    return channels_ == other.channels_ && bins_ == other.bins_;
  }
  bool all_finite() const;

  HVector& operator+=(const HVector& other);
  HVector& operator-=(const HVector& other);
  HVector& operator*=(double s);

  friend HVector operator+(HVector a, const HVector& b) { return a += b; }
  friend HVector operator-(HVector a, const HVector& b) { return a -= b; }
  friend HVector operator*(double s, HVector a) { return a *= s; }

  friend bool operator==(const HVector&, const HVector&) = default;

 private:
  std::size_t channels_ = 0;
  std::size_t bins_ = 0;
  std::vector<double> data_;
};

// sum_c sum_i w_i u(c,i) v(c,i)
double inner(const HVector& u, const HVector& v, const TimeGrid& grid);
double norm(const HVector& u, const TimeGrid& grid);
// ||u - v|| without materializing the difference.
double distance(const HVector& u, const HVector& v, const TimeGrid& grid);

// sum_j coeffs[j] * vectors[j]
HVector combine(std::span<const double> coeffs, std::span<const HVector* const> vectors);
HVector combine(std::initializer_list<double> coeffs,
                std::initializer_list<const HVector*> vectors);

void check_grid(const HVector& u, const TimeGrid& grid);
void check_same_shape(const HVector& u, const HVector& v);

}  // namespace fbfvi
