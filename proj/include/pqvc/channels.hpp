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

#include <optional>
#include <span>
#include <vector>

#include "pqvc/linalg.hpp"

namespace pqvc {

struct KrausChannel {
  std::vector<ComplexMatrix> operators;
  int arity = 1;

  /// max |sum_i E_i^dagger E_i - I|.
  double completeness_error() const;
  /// Column-stacking superoperator sum_i conj(E_i) kron E_i.
  ComplexMatrix superoperator() const;
};

/// Superoperator over the vectorized space of `arity` qubits.
struct LindbladGenerator {
  ComplexMatrix matrix;
  int arity = 1;

  LindbladGenerator& operator+=(const LindbladGenerator& other);
  /// Time-1 propagator exp(L).
  ComplexMatrix propagator() const { return matexp(matrix); }
};

/// Where a single-qubit channel is inserted relative to R = R_Z R_Y R_Z.
enum class Placement {
  kPerGate,    // once after the composed rotation
  kPerFactor,  // after each of the three Euler factors
};

struct SingleQubitNoise {
  bool depolarizing = false;
  double p_depol = 0.0;
  Placement depol_placement = Placement::kPerGate;

  bool phase_damping = false;
  double mu = 0.0;
  double sigma = 0.0;
  Placement phase_placement = Placement::kPerFactor;

  bool thermal = false;
  double t_tilde = 0.01;
  double gamma = 0.0;
};

struct TwoQubitNoise {
  double p_depol = 0.0;
  double alpha = 0.0;
};

/// Declarative noise model: single-qubit channels after every rotation and an
/// optional composite channel after every entangling gate. Without
/// `two_qubit` the entanglers are noise-free (partial error correction).
struct NoiseSpec {
  SingleQubitNoise single;
  std::optional<TwoQubitNoise> two_qubit;

  /// Throws std::invalid_argument on out-of-range strengths.
  void validate() const;
  bool noiseless() const;
};

// Calibration constants for the two-qubit composite channel.
inline constexpr double kTwoQubitDepolCalibrated = 0.0019;
inline constexpr double kCrosstalkAlphaCalibrated = 1.16e-3;

/// {sqrt(1-p) I, sqrt(p/3) X, sqrt(p/3) Y, sqrt(p/3) Z}; requires 0 <= p <= 3/4.
KrausChannel depolarizing_kraus(double p);

/// Probability of decay p_- = e^{1/T}/(2 cosh(1/T)) at generalized temperature T.
double thermal_decay_probability(double t_tilde);

/// Generalized amplitude damping toward the thermal state; t_tilde > 0,
/// gamma in [0, 1].
KrausChannel thermal_kraus(double t_tilde, double gamma);

/// sum_i (E_i on targets) rho (E_i on targets)^dagger.
DensityMatrix apply_channel(const DensityMatrix& rho, const KrausChannel& channel,
                            std::span<const int> targets);

/// Coherence multiplier E[e^{-i theta}] for theta ~ N(mu, sigma^2).
Complex gaussian_dephasing_factor(double mu, double sigma);

/// Gaussian random Z over-rotation, evaluated in closed form.
DensityMatrix gaussian_phase_damping_apply(const DensityMatrix& rho, double mu, double sigma,
                                           int target);

// In-place forms used by the circuit engine. `m` is any 2^n x 2^n operator.

/// Single-qubit map that never mixes populations with coherences. Splitting
/// the operator into 2x2 blocks B_ab by the target bit:
///   B00 <- p00 B00 + p01 B11,  B11 <- p10 B00 + p11 B11,
///   B01 <- coherence B01,      B10 <- conj(coherence) B10.
/// Depolarizing, Gaussian dephasing, thermal damping and Z rotations all
/// have this form.
struct PhaseCovariantMap {
  double p00 = 1.0, p01 = 0.0, p10 = 0.0, p11 = 1.0;
  Complex coherence{1.0, 0.0};

  /// Heisenberg-picture adjoint.
  PhaseCovariantMap adjoint() const;
};

PhaseCovariantMap depolarizing_map(double p);
PhaseCovariantMap dephasing_map(Complex factor);
PhaseCovariantMap thermal_map(double t_tilde, double gamma);

void apply_phase_covariant(ComplexMatrix& m, const PhaseCovariantMap& map, int target,
                           int num_qubits);

/// Coherences |0><1| on `target` scale by `factor`, |1><0| by conj(factor).
void dephase_inplace(ComplexMatrix& m, Complex factor, int target, int num_qubits);
/// Depolarizing channel on `target`; the map is self-adjoint.
void depolarize_inplace(ComplexMatrix& m, double p, int target, int num_qubits);

/// Generator whose exponential is the depolarizing channel with strength p
/// (0 <= p < 3/4) on local qubit `target` of an `arity`-qubit space.
LindbladGenerator lindblad_depolarizing(double p, int target = 0, int arity = 1);
/// Generator of conjugation by exp(-i alpha Z_a Z_b) on an `arity`-qubit space.
LindbladGenerator lindblad_crosstalk(double alpha, int qubit_a = 0, int qubit_b = 1,
                                     int arity = 2);

/// Composite channel exp(L) applied after an entangling gate on (q1, q2):
/// depolarizing on q1 and q2 plus crosstalk on (q1-1, q1) and (q2, q2+1).
/// Neighbor pairs outside [0, n-1] are dropped (open boundary).
class CompositeNoiseChannel {
 public:
  CompositeNoiseChannel(const TwoQubitNoise& noise, int q1, int q2, int num_qubits);

  /// Sorted qubits the channel touches.
  const std::vector<int>& support() const { return support_; }
  const ComplexMatrix& superoperator() const { return superop_; }
  const ComplexMatrix& adjoint_superoperator() const { return adjoint_; }

  DensityMatrix apply(const DensityMatrix& rho) const;
  void apply_inplace(ComplexMatrix& m) const;
  void apply_adjoint_inplace(ComplexMatrix& m) const;

 private:
  std::vector<int> support_;
  ComplexMatrix superop_;
  ComplexMatrix adjoint_;
  local::Axes axes_;
};

CompositeNoiseChannel two_qubit_noise_channel(const NoiseSpec& spec, int q1, int q2,
                                              int num_qubits);

}  // namespace pqvc
