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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fbfvi {

// Shapes of two vectors (or a vector and a grid/set) disagree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid construction parameters for a grid, set, network or schedule.
class ConstructionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input outside the domain an operation accepts (e.g. negative inflow to
// the point-queue loader).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The operator produced a non-finite value.
class OperatorEvaluationError : public std::runtime_error {
 public:
  OperatorEvaluationError(const std::string& what, std::vector<std::size_t> indices)
      : std::runtime_error(what), indices_(std::move(indices)) {}

  // Flat (channel * bins + bin) indices of the offending entries.
  const std::vector<std::size_t>& indices() const { return indices_; }

 private:
  std::vector<std::size_t> indices_;
};

// Malformed or semantically invalid experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fbfvi
