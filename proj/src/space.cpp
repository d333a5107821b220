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

#include "fbfvi/space.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "fbfvi/error.hpp"
#include "fbfvi/kernels.hpp"

namespace fbfvi {

TimeGrid::TimeGrid(double t0, double t1, std::vector<double> weights)
    : t0_(t0), t1_(t1), weights_(std::move(weights)) {
  if (!(std::isfinite(t0) && std::isfinite(t1) && t0 < t1)) {
    throw ConstructionError("time grid requires finite t0 < t1");
  }
  if (weights_.empty()) throw ConstructionError("time grid requires at least one bin");
  double sum = 0.0;
  starts_.reserve(weights_.size());
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw ConstructionError("time grid weights must be positive and finite");
    }
    starts_.push_back(t0_ + sum);
    sum += w;
  }
  const double span = t1_ - t0_;
  if (std::abs(sum - span) > 1e-12 * span) {
    throw ConstructionError("time grid weights sum to " + std::to_string(sum) +
                            ", expected t1 - t0 = " + std::to_string(span));
  }
}

TimeGrid TimeGrid::uniform(double t0, double t1, std::size_t bins) {
  if (bins == 0) throw ConstructionError("time grid requires at least one bin");
  const double w = (t1 - t0) / static_cast<double>(bins);
  return TimeGrid(t0, t1, std::vector<double>(bins, w));
}

TimeGrid TimeGrid::from_weights(double t0, double t1, std::vector<double> weights) {
  return TimeGrid(t0, t1, std::move(weights));
}

bool TimeGrid::is_uniform() const {
  for (double w : weights_) {
    if (w != weights_.front()) return false;
  }
  return true;
}

HVector::HVector(std::size_t channels, std::size_t bins, double value)
    : channels_(channels), bins_(bins), data_(channels * bins, value) {
  if (channels == 0 || bins == 0) throw DimensionError("HVector needs C >= 1 and M >= 1");
}

HVector::HVector(std::size_t channels, std::size_t bins, std::vector<double> data)
    : channels_(channels), bins_(bins), data_(std::move(data)) {
  if (channels == 0 || bins == 0) throw DimensionError("HVector needs C >= 1 and M >= 1");
  if (data_.size() != channels * bins) {
    throw DimensionError("HVector data has " + std::to_string(data_.size()) +
                         " entries, expected " + std::to_string(channels * bins));
  }
}

HVector HVector::from_values(std::initializer_list<double> values) {
  return from_values(std::vector<double>(values));
}

HVector HVector::from_values(std::vector<double> values) {
  const std::size_t d = values.size();
  return HVector(d, 1, std::move(values));
}

bool HVector::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

HVector& HVector::operator+=(const HVector& other) {
  check_same_shape(*this, other);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

HVector& HVector::operator-=(const HVector& other) {
  check_same_shape(*this, other);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

HVector& HVector::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

void check_same_shape(const HVector& u, const HVector& v) {
  if (!u.same_shape(v)) {
    throw DimensionError("shape mismatch: (" + std::to_string(u.channels()) + "," +
                         std::to_string(u.bins()) + ") vs (" + std::to_string(v.channels()) +
                         "," + std::to_string(v.bins()) + ")");
  }
}

void check_grid(const HVector& u, const TimeGrid& grid) {
  if (u.bins() != grid.bins()) {
    throw DimensionError("vector has " + std::to_string(u.bins()) + " bins, grid has " +
                         std::to_string(grid.bins()));
  }
}

double inner(const HVector& u, const HVector& v, const TimeGrid& grid) {
  check_same_shape(u, v);
  check_grid(u, grid);
  return kernels::weighted_dot(u.data(), v.data(), grid.weights());
}

double norm(const HVector& u, const TimeGrid& grid) {
  check_grid(u, grid);
  return std::sqrt(kernels::weighted_dot(u.data(), u.data(), grid.weights()));
}

double distance(const HVector& u, const HVector& v, const TimeGrid& grid) {
  check_same_shape(u, v);
  check_grid(u, grid);
  return std::sqrt(kernels::weighted_sq_distance(u.data(), v.data(), grid.weights()));
}

HVector combine(std::span<const double> coeffs, std::span<const HVector* const> vectors) {
  if (coeffs.size() != vectors.size()) {
    throw DimensionError("combine: coefficient and vector counts differ");
  }
  if (vectors.empty()) throw DimensionError("combine: at least one term required");
  const HVector& first = *vectors.front();
  std::vector<const double*> inputs;
  inputs.reserve(vectors.size());
  for (const HVector* v : vectors) {
    check_same_shape(first, *v);
    inputs.push_back(v->data().data());
  }
  HVector out(first.channels(), first.bins());
  kernels::linear_combination(out.data(), coeffs, inputs);
  return out;
}

HVector combine(std::initializer_list<double> coeffs,
                std::initializer_list<const HVector*> vectors) {
  return combine(std::span<const double>(coeffs.begin(), coeffs.size()),
                 std::span<const HVector* const>(vectors.begin(), vectors.size()));
}

}  // namespace fbfvi
