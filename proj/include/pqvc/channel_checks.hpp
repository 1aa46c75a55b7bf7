// Copyright 2026 The pqvc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pqvc/linalg.hpp"

namespace pqvc {

struct PropertyResult {
  std::string name;
  bool passed = false;
  /// Worst observed value of the property's statistic.
  double max_deviation = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct ChannelCheckOptions {
  std::size_t draws = 100;
  std::size_t mc_samples = 1000000;
  std::uint64_t seed = 11;
  /// Scales the closed-form dephasing factor by an extra e^{-sigma^2/2}.
  bool inject_wrong_dephasing = false;
};

/// Randomized property suite over every channel. Each property reports its
/// worst deviation against a fixed tolerance.
std::vector<PropertyResult> run_channel_checks(const ChannelCheckOptions& options);

/// Haar-like random density matrix from a complex Ginibre matrix.
ComplexMatrix random_density(int num_qubits, std::mt19937_64& rng);
/// Single-qubit rotation about a random axis by a random angle.
ComplexMatrix random_qubit_unitary(std::mt19937_64& rng);

}  // namespace pqvc
