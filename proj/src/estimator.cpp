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

#include "pqvc/estimator.hpp"

#include <algorithm>
#include <cmath>

namespace pqvc::qec {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

bool in_unit_open(double x) { return x > 0.0 && x < 1.0; }

}  // namespace

BudgetSplit budget_split(double epsilon) {
  require(in_unit_open(epsilon), "error budget must lie in (0, 1)");
  const double third = epsilon / 3.0;
  return BudgetSplit{third, third, third};
}

RequiredRate required_rate(double eps_component, double count) {
  require(in_unit_open(eps_component), "error budget component must lie in (0, 1)");
  require(count >= 1.0, "unit count must be at least 1");
  // log1p/expm1 keep the exact form accurate when eps / count is tiny.
  const double exact = -std::expm1(std::log1p(-eps_component) / count);
  return RequiredRate{exact, eps_component / count};
}

double logical_error_rate(double p_phys, int d, double p_star, double coeff) {
  require(d > 0 && d % 2 == 1, "code distance must be a positive odd integer");
  require(p_phys >= 0.0 && p_star > 0.0 && coeff > 0.0, "invalid logical error parameters");
  return coeff * std::pow(p_phys / p_star, 0.5 * (d + 1));
}

int choose_distance(double p_phys, double target_rate, double p_star, double coeff,
                    int max_distance) {
  require(target_rate > 0.0, "target logical error rate must be positive");
  require(p_phys >= 0.0, "physical error rate must be non-negative");
  // Relative slack absorbs rounding when the target sits exactly on a row.
  constexpr double kSlack = 1e-9;
  for (int d = 1; d <= max_distance; d += 2) {
    if (logical_error_rate(p_phys, d, p_star, coeff) <= target_rate * (1.0 + kSlack)) return d;
  }
  throw UnreachableError("no odd code distance up to " + std::to_string(max_distance) +
                         " reaches logical error rate " + std::to_string(target_rate));
}

std::int64_t logical_tiles(std::int64_t q_alg) {
  require(q_alg >= 1, "qubit count must be positive");
  // Integer ceil(sqrt(8Q)) avoids floating-point edge cases at perfect squares.
  const std::int64_t eight_q = 8 * q_alg;
  std::int64_t root = static_cast<std::int64_t>(std::sqrt(static_cast<double>(eight_q)));
  while (root * root < eight_q) ++root;
  while (root > 0 && (root - 1) * (root - 1) >= eight_q) --root;
  return 2 * q_alg + root + 1;
}

std::int64_t data_qubits(std::int64_t q_alg, std::int64_t d) {
  require(q_alg >= 1 && d >= 1, "qubit count and distance must be positive");
  return 2 * logical_tiles(q_alg) * d * d;
}

void DistillationProtocol::validate() const {
  require(n_consume > m_x, "protocol must consume more states than it has X stabilizers");
  require(k_out >= 1, "protocol must output at least one state");
  require(d > 0 && d % 2 == 1, "protocol distance must be a positive odd integer");
  require(c_const > 0.0, "parity constant must be positive");
  require(p0 >= 0.0 && p0 < 1.0, "input error rate must lie in [0, 1)");
}

DistillationProtocol fifteen_to_one(double p0, int d, double c_const) {
  return DistillationProtocol{"15-to-1", 4, 15, 1, d, c_const, p0};
}

double distill_spatial(const DistillationProtocol& protocol, int layers, SpatialForm form) {
  protocol.validate();
  require(layers >= 0, "layer count must be non-negative");
  const double extra = form == SpatialForm::kTable ? 4.0 : 0.0;
  const double per_layer = (1.5 * (protocol.m_x + protocol.k_out) + extra) / protocol.k_out;
  return std::pow(per_layer, layers);
}

double distilled_error(const DistillationProtocol& protocol, int layer) {
  protocol.validate();
  require(layer >= 0, "layer index must be non-negative");
  double p = protocol.p0;
  const double exponent = 0.5 * (protocol.d + 1);
  for (int l = 0; l < layer; ++l) {
    p = protocol.c_const * std::pow(p, exponent);
    if (!(p < 1.0)) {
      throw UnreachableError("distillation does not suppress errors: p_" + std::to_string(l + 1) +
                             " = " + std::to_string(p));
    }
  }
  return p;
}

TemporalCost distill_temporal(const DistillationProtocol& protocol, int layers) {
  protocol.validate();
  require(layers >= 1, "temporal cost needs at least one layer");
  TemporalCost out;
  const double base = protocol.n_consume - protocol.m_x;
  const double ratio = static_cast<double>(protocol.n_consume) / protocol.k_out;
  for (int l = 1; l <= layers; ++l) {
    const double p_in = distilled_error(protocol, l - 1);
    const double power = protocol.n_consume * std::pow(ratio, layers - l);
    const double term = base * std::exp(-power * std::log1p(-p_in));
    out.per_layer.push_back(term);
    out.total += term;
  }
  out.dominant_term = out.per_layer.front();
  return out;
}

CostReport spacetime_product(const DistillationProtocol& protocol, int layers, SpatialForm form) {
  protocol.validate();
  require(layers >= 0, "layer count must be non-negative");
  CostReport r;
  r.layers = layers;
  for (int l = 0; l <= layers; ++l) r.error_per_layer.push_back(distilled_error(protocol, l));
  r.p_out = r.error_per_layer.back();
  if (layers == 0) return r;
  r.spatial = distill_spatial(protocol, layers, form);
  const TemporalCost t = distill_temporal(protocol, layers);
  r.temporal = t.total;
  r.dominant_temporal = t.dominant_term;
  r.temporal_per_layer = t.per_layer;
  r.spacetime = r.spatial * r.temporal;
  return r;
}

double p0_from_physical(double p_two_qubit, double p_one_qubit, double p_init) {
  for (double p : {p_two_qubit, p_one_qubit, p_init}) {
    require(p >= 0.0 && p < 1.0, "physical error rates must lie in [0, 1)");
  }
  return 0.4 * p_two_qubit + (2.0 / 3.0) * p_one_qubit + 2.0 * p_init;
}

double rb_decay(double p_depol) {
  require(p_depol >= 0.0 && p_depol <= 0.75, "depolarizing strength must lie in [0, 3/4]");
  const double lambda = 1.0 - 4.0 * p_depol / 3.0;
  return 0.5 * (1.0 + lambda * lambda);
}

double gate_error(double p_depol) { return 0.5 * (1.0 - rb_decay(p_depol)); }

double depol_from_gate_error(double r) {
  require(r >= 0.0 && r <= 0.25, "gate error must lie in [0, 1/4]");
  // p = 1 - 2r and lambda^2 = 2p - 1 = 1 - 4r with lambda >= 0.
  const double lambda = std::sqrt(std::max(0.0, 1.0 - 4.0 * r));
  return 0.75 * (1.0 - lambda);
}

double rotation_error_from_t(double eps_t, double eps_synth, double scaling) {
  require(eps_t >= 0.0 && eps_t < 1.0, "T error must lie in [0, 1)");
  require(in_unit_open(eps_synth), "synthesis accuracy must lie in (0, 1)");
  require(scaling > 0.0, "T-count scaling must be positive");
  const double count = scaling * std::log2(1.0 / eps_synth);
  return -std::expm1(count * std::log1p(-eps_t));
}

double shot_noise_bound(double shots, double bernoulli_p) {
  require(shots >= 1.0, "shot count must be at least 1");
  require(bernoulli_p >= 0.0 && bernoulli_p <= 1.0, "probability must lie in [0, 1]");
  return 0.6 * std::sqrt(4.0 * bernoulli_p * (1.0 - bernoulli_p) / shots);
}

std::vector<CatalogEntry> protocol_catalog() {
  return {
      {"No distillation", std::nullopt, 1.0, 1.0, std::nullopt},
      {"(15-to-1)_(7,3,3)", 11, 6.69, 1.65, 4.4e-8},
      {"(15-to-1)_(9,3,3)", 13, 4.51, 2.78, 1.5e-9},
      {"(15-to-1)^4_(9,3,3) x (20-to-4)_(15,7,9)", 19, 45.43, 4.75, 2.4e-15},
  };
}

}  // namespace pqvc::qec
