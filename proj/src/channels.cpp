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

#include "pqvc/channels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pqvc/gates.hpp"

namespace pqvc {

namespace {

constexpr Complex kI{0.0, 1.0};

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

std::vector<int> composite_support(int q1, int q2, int n) {
  require(q1 != q2, "two-qubit noise: q1 and q2 must differ");
  require(q1 >= 0 && q1 < n && q2 >= 0 && q2 < n, "two-qubit noise: qubit index out of range");
  std::vector<int> s{q1, q2};
  if (q1 - 1 >= 0) s.push_back(q1 - 1);
  if (q2 + 1 < n) s.push_back(q2 + 1);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

int position_of(const std::vector<int>& support, int q) {
  return static_cast<int>(std::find(support.begin(), support.end(), q) - support.begin());
}

}  // namespace

double KrausChannel::completeness_error() const {
  const std::size_t d = std::size_t{1} << arity;
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (const auto& e : operators) sum += e.adjoint() * e;
  return max_abs_diff(sum, ComplexMatrix::Identity(d, d));
}

ComplexMatrix KrausChannel::superoperator() const {
  const std::size_t d = std::size_t{1} << arity;
  ComplexMatrix s = ComplexMatrix::Zero(d * d, d * d);
  for (const auto& e : operators) s += kron(e.conjugate(), e);
  return s;
}

LindbladGenerator& LindbladGenerator::operator+=(const LindbladGenerator& other) {
  require(arity == other.arity, "cannot add generators over different qubit counts");
  matrix += other.matrix;
  return *this;
}

void NoiseSpec::validate() const {
  const auto& s = single;
  require(s.p_depol >= 0.0 && s.p_depol <= 0.75,
          "noise.p_depol must lie in [0, 3/4], got " + std::to_string(s.p_depol));
  require(s.sigma >= 0.0, "noise.sigma must be non-negative");
  require(std::isfinite(s.mu), "noise.mu must be finite");
  require(s.t_tilde > 0.0, "noise.t_tilde must be positive");
  require(s.gamma >= 0.0 && s.gamma <= 1.0, "noise.gamma must lie in [0, 1]");
  if (two_qubit) {
    require(two_qubit->p_depol >= 0.0 && two_qubit->p_depol < 0.75,
            "noise.two_qubit.p_depol must lie in [0, 3/4)");
    require(std::isfinite(two_qubit->alpha), "noise.two_qubit.alpha must be finite");
  }
}

bool NoiseSpec::noiseless() const {
  const bool single_active = (single.depolarizing && single.p_depol > 0.0) ||
                             (single.phase_damping && (single.sigma > 0.0 || single.mu != 0.0)) ||
                             (single.thermal && single.gamma > 0.0);
  const bool two_active =
      two_qubit && (two_qubit->p_depol > 0.0 || two_qubit->alpha != 0.0);
  return !single_active && !two_active;
}

KrausChannel depolarizing_kraus(double p) {
  require(p >= 0.0 && p <= 0.75, "depolarizing strength must lie in [0, 3/4], got " +
                                     std::to_string(p));
  const double w = std::sqrt(p / 3.0);
  return KrausChannel{{std::sqrt(1.0 - p) * identity2(), w * pauli_matrix(Pauli::X),
                       w * pauli_matrix(Pauli::Y), w * pauli_matrix(Pauli::Z)},
                      1};
}

double thermal_decay_probability(double t_tilde) {
  require(t_tilde > 0.0, "generalized temperature must be positive");
  // e^x / (2 cosh x) = 1 / (1 + e^{-2x}) with x = 1/T.
  return 1.0 / (1.0 + std::exp(-2.0 / t_tilde));
}

KrausChannel thermal_kraus(double t_tilde, double gamma) {
  require(gamma >= 0.0 && gamma <= 1.0, "thermal decay gamma must lie in [0, 1]");
  const double pm = thermal_decay_probability(t_tilde);
  const double keep = std::sqrt(1.0 - gamma);
  ComplexMatrix e0 = ComplexMatrix::Zero(2, 2);
  e0(0, 0) = 1.0;
  e0(1, 1) = keep;
  ComplexMatrix lower = ComplexMatrix::Zero(2, 2);  // |0><1|
  lower(0, 1) = 1.0;
  ComplexMatrix e2 = ComplexMatrix::Zero(2, 2);
  e2(0, 0) = keep;
  e2(1, 1) = 1.0;
  return KrausChannel{{std::sqrt(pm) * e0, std::sqrt(pm * gamma) * lower,
                       std::sqrt(1.0 - pm) * e2,
                       std::sqrt((1.0 - pm) * gamma) * ComplexMatrix(lower.adjoint())},
                      1};
}

DensityMatrix apply_channel(const DensityMatrix& rho, const KrausChannel& channel,
                            std::span<const int> targets) {
  if (static_cast<int>(targets.size()) != channel.arity) {
    throw std::invalid_argument("channel arity " + std::to_string(channel.arity) +
                                " does not match " + std::to_string(targets.size()) +
                                " target(s)");
  }
  ComplexMatrix m = rho.matrix();
  local::apply_kraus(m, channel.operators, local::Axes(targets, rho.num_qubits()));
  return DensityMatrix::trusted(std::move(m));
}

Complex gaussian_dephasing_factor(double mu, double sigma) {
  return std::exp(Complex(-0.5 * sigma * sigma, -mu));
}

PhaseCovariantMap PhaseCovariantMap::adjoint() const {
  return PhaseCovariantMap{p00, p10, p01, p11, std::conj(coherence)};
}

PhaseCovariantMap depolarizing_map(double p) {
  const double keep = 1.0 - 2.0 * p / 3.0;
  const double flip = 2.0 * p / 3.0;
  return PhaseCovariantMap{keep, flip, flip, keep, Complex(1.0 - 4.0 * p / 3.0, 0.0)};
}

PhaseCovariantMap dephasing_map(Complex factor) {
  return PhaseCovariantMap{1.0, 0.0, 0.0, 1.0, factor};
}

PhaseCovariantMap thermal_map(double t_tilde, double gamma) {
  require(gamma >= 0.0 && gamma <= 1.0, "thermal decay gamma must lie in [0, 1]");
  const double pm = thermal_decay_probability(t_tilde);
  return PhaseCovariantMap{1.0 - (1.0 - pm) * gamma, pm * gamma, (1.0 - pm) * gamma,
                           1.0 - pm * gamma, Complex(std::sqrt(1.0 - gamma), 0.0)};
}

void apply_phase_covariant(ComplexMatrix& m, const PhaseCovariantMap& map, int target,
                           int num_qubits) {
  const std::size_t dim = static_cast<std::size_t>(m.rows());
  const std::size_t bit = std::size_t{1} << (num_qubits - 1 - target);
  const Complex f = map.coherence;
  const Complex fc = std::conj(f);
  for (std::size_t c = 0; c < dim; ++c) {
    if (c & bit) continue;
    Complex* c0 = m.data() + c * dim;
    Complex* c1 = m.data() + (c | bit) * dim;
    for (std::size_t r = 0; r < dim; ++r) {
      if (r & bit) continue;
      const std::size_t r1 = r | bit;
      const Complex b00 = c0[r];
      const Complex b11 = c1[r1];
      c0[r] = map.p00 * b00 + map.p01 * b11;
      c1[r1] = map.p10 * b00 + map.p11 * b11;
      c1[r] *= f;
      c0[r1] *= fc;
    }
  }
}

void dephase_inplace(ComplexMatrix& m, Complex factor, int target, int num_qubits) {
  apply_phase_covariant(m, dephasing_map(factor), target, num_qubits);
}

void depolarize_inplace(ComplexMatrix& m, double p, int target, int num_qubits) {
  apply_phase_covariant(m, depolarizing_map(p), target, num_qubits);
}

DensityMatrix gaussian_phase_damping_apply(const DensityMatrix& rho, double mu, double sigma,
                                           int target) {
  require(sigma >= 0.0, "phase damping sigma must be non-negative");
  require(target >= 0 && target < rho.num_qubits(), "phase damping target out of range");
  ComplexMatrix m = rho.matrix();
  dephase_inplace(m, gaussian_dephasing_factor(mu, sigma), target, rho.num_qubits());
  return DensityMatrix::trusted(std::move(m));
}

LindbladGenerator lindblad_depolarizing(double p, int target, int arity) {
  require(p >= 0.0 && p < 0.75,
          "depolarizing generator needs 0 <= p < 3/4, got " + std::to_string(p));
  const std::size_t d = std::size_t{1} << arity;
  LindbladGenerator g{ComplexMatrix::Zero(d * d, d * d), arity};
  if (p == 0.0) return g;
  // The channel is diagonal in the Pauli transfer basis with eigenvalue
  // lambda = 1 - 4p/3 on X, Y, Z; L = kappa sum_P (P . P - .) has eigenvalue
  // -4 kappa there, so kappa = -ln(lambda) / 4.
  const double kappa = -std::log(1.0 - 4.0 * p / 3.0) / 4.0;
  const std::array<int, 1> t{target};
  const ComplexMatrix id = ComplexMatrix::Identity(d * d, d * d);
  for (Pauli pa : {Pauli::X, Pauli::Y, Pauli::Z}) {
    const ComplexMatrix op = embed_local(pauli_matrix(pa), t, arity);
    g.matrix += kappa * (kron(op.conjugate(), op) - id);
  }
  return g;
}

LindbladGenerator lindblad_crosstalk(double alpha, int qubit_a, int qubit_b, int arity) {
  const std::size_t d = std::size_t{1} << arity;
  const std::array<int, 2> t{qubit_a, qubit_b};
  const ComplexMatrix zz = kron(pauli_matrix(Pauli::Z), pauli_matrix(Pauli::Z));
  const ComplexMatrix h = alpha * embed_local(zz, t, arity);
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  // vec(H X) = (I kron H) vec X,  vec(X H) = (H^T kron I) vec X.
  return LindbladGenerator{-kI * (kron(id, h) - kron(h.transpose(), id)), arity};
}

CompositeNoiseChannel::CompositeNoiseChannel(const TwoQubitNoise& noise, int q1, int q2,
                                             int num_qubits)
    : support_(composite_support(q1, q2, num_qubits)), axes_(support_, num_qubits) {
  const int k = static_cast<int>(support_.size());
  const std::size_t d = std::size_t{1} << k;
  LindbladGenerator total{ComplexMatrix::Zero(d * d, d * d), k};
  if (noise.p_depol > 0.0) {
    total += lindblad_depolarizing(noise.p_depol, position_of(support_, q1), k);
    total += lindblad_depolarizing(noise.p_depol, position_of(support_, q2), k);
  }
  if (noise.alpha != 0.0) {
    if (q1 - 1 >= 0 && q1 - 1 != q2) {
      total += lindblad_crosstalk(noise.alpha, position_of(support_, q1 - 1),
                                  position_of(support_, q1), k);
    }
    if (q2 + 1 < num_qubits && q2 + 1 != q1) {
      total += lindblad_crosstalk(noise.alpha, position_of(support_, q2),
                                  position_of(support_, q2 + 1), k);
    }
  }
  superop_ = total.propagator();
  adjoint_ = superop_.adjoint();
}

DensityMatrix CompositeNoiseChannel::apply(const DensityMatrix& rho) const {
  ComplexMatrix m = rho.matrix();
  apply_inplace(m);
  return DensityMatrix::trusted(std::move(m));
}

void CompositeNoiseChannel::apply_inplace(ComplexMatrix& m) const {
  local::apply_superoperator(m, superop_, axes_);
}

void CompositeNoiseChannel::apply_adjoint_inplace(ComplexMatrix& m) const {
  local::apply_superoperator(m, adjoint_, axes_);
}

CompositeNoiseChannel two_qubit_noise_channel(const NoiseSpec& spec, int q1, int q2,
                                              int num_qubits) {
  return CompositeNoiseChannel(spec.two_qubit.value_or(TwoQubitNoise{}), q1, q2, num_qubits);
}

}  // namespace pqvc
