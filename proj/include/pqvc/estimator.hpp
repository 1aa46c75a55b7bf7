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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pqvc::qec {

/// Raised when a requested target cannot be met (no distance suffices, or a
/// distillation layer stops suppressing errors).
class UnreachableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kThreshold = 0.01;
inline constexpr double kLogicalCoefficient = 0.03;

struct BudgetSplit {
  double eps_log = 0.0;
  double eps_dis = 0.0;
  double eps_syn = 0.0;
};

/// Equal thirds of the total budget; epsilon in (0, 1).
BudgetSplit budget_split(double epsilon);

struct RequiredRate {
  double exact = 0.0;       // 1 - (1 - eps)^(1/count)
  double linearized = 0.0;  // eps / count
};

RequiredRate required_rate(double eps_component, double count);

/// coeff (p / p_star)^((d+1)/2). Even or non-positive d is rejected.
double logical_error_rate(double p_phys, int d, double p_star = kThreshold,
                          double coeff = kLogicalCoefficient);

/// Smallest odd d with logical_error_rate <= target. Throws UnreachableError
/// if none exists up to `max_distance`.
int choose_distance(double p_phys, double target_rate, double p_star = kThreshold,
                    double coeff = kLogicalCoefficient, int max_distance = 999);

/// Logical patches for Q algorithmic qubits: 2Q + ceil(sqrt(8Q)) + 1.
std::int64_t logical_tiles(std::int64_t q_alg);

/// 2 logical_tiles(Q) d^2 physical qubits.
std::int64_t data_qubits(std::int64_t q_alg, std::int64_t d);

struct DistillationProtocol {
  std::string name;
  int m_x = 4;
  int n_consume = 15;
  int k_out = 1;
  int d = 3;
  double c_const = 1.0;
  double p0 = 1e-4;

  void validate() const;
};

/// 15-to-1 with the given input error rate.
DistillationProtocol fifteen_to_one(double p0, int d = 3, double c_const = 35.0);

enum class SpatialForm {
  kTable,  // ((1.5 (m_X + k) + 4) / k)^L
  kText,   // (1.5 (m_X + k) / k)^L
};

/// Spatial cost in units of d^2.
double distill_spatial(const DistillationProtocol& protocol, int layers,
                       SpatialForm form = SpatialForm::kTable);

/// p_l from p_{l+1} = C p_l^((d+1)/2) starting at p0. Throws UnreachableError
/// once an iterate reaches 1.
double distilled_error(const DistillationProtocol& protocol, int layer);

struct TemporalCost {
  double total = 0.0;          // units of d
  double dominant_term = 0.0;  // first-layer term of the sum
  std::vector<double> per_layer;
};

/// (n - m_X) sum_{l=1}^{L} (1 - p_{l-1})^{-n (n/k)^{L-l}}, where layer l
/// consumes states at the error rate p_{l-1} produced by the layer before it.
TemporalCost distill_temporal(const DistillationProtocol& protocol, int layers);

struct CostReport {
  int layers = 0;
  double spatial = 1.0;    // d^2
  double temporal = 1.0;   // d
  double spacetime = 1.0;  // d^3
  double p_out = 0.0;
  double dominant_temporal = 1.0;
  std::vector<double> temporal_per_layer;
  std::vector<double> error_per_layer;  // p_0 .. p_L
};

/// spatial x temporal. L = 0 is bare injection: unit cost, p_out = p0.
CostReport spacetime_product(const DistillationProtocol& protocol, int layers,
                             SpatialForm form = SpatialForm::kTable);

/// (2/5) p_2q + (2/3) p_1q + 2 p_init, dropping second-order terms.
double p0_from_physical(double p_two_qubit, double p_one_qubit, double p_init);

/// Randomized-benchmarking decay parameter for single-qubit depolarizing
/// strength p_depol: (1 + (1 - 4 p_depol / 3)^2) / 2.
double rb_decay(double p_depol);
/// r = (1 - p) / 2 for a single qubit.
double gate_error(double p_depol);
/// Inverse of gate_error on the physical branch p_depol in [0, 3/4].
double depol_from_gate_error(double r);

/// 1 - (1 - eps_t)^(scaling log2(1 / eps_synth)).
double rotation_error_from_t(double eps_t, double eps_synth, double scaling);

/// 0.6 sqrt(4 p (1 - p) / N).
double shot_noise_bound(double shots, double bernoulli_p);

/// Literature rows kept for reference. These are external results, not
/// outputs of the formulas above.
struct CatalogEntry {
  std::string protocol;
  std::optional<int> distance;
  double space_d2 = 1.0;
  double time_d = 1.0;
  /// Distilled error at input p = 1e-4; empty means "p passes through".
  std::optional<double> p_distilled;
};

std::vector<CatalogEntry> protocol_catalog();

}  // namespace pqvc::qec
