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
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "pqvc/channels.hpp"
#include "pqvc/gates.hpp"
#include "pqvc/linalg.hpp"

namespace pqvc {

enum class Entangler { kChain, kRing };
enum class Readout { kQuantumOnly, kClassical };

/// Elementwise readout layer y_k = w_k <Z_k> + c_k over the readout qubits.
struct ClassicalLayer {
  std::vector<double> weights;
  std::vector<double> biases;
};

/// Trainable parameters. Euler angles are laid out (layer, qubit, factor)
/// with factor 0 = alpha, 1 = beta, 2 = gamma.
struct CircuitParams {
  int layers = 0;
  int qubits = 0;
  std::vector<double> thetas;
  std::optional<ClassicalLayer> classical;

  static CircuitParams zeros(int layers, int qubits);

  static std::size_t index(int qubits, int layer, int qubit, int factor) {
    return (static_cast<std::size_t>(layer) * qubits + qubit) * 3 + factor;
  }
  double& angle(int layer, int qubit, int factor) { return thetas[index(qubits, layer, qubit, factor)]; }
  double angle(int layer, int qubit, int factor) const {
    return thetas[index(qubits, layer, qubit, factor)];
  }
  EulerAngles euler(int layer, int qubit) const;

  /// Quantum angles followed by classical weights then biases.
  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);
  std::size_t size() const;
};

struct ModelConfig {
  int n_qubits = 2;
  int n_layers = 1;
  NoiseSpec noise;
  std::size_t shots = 0;  // 0 means exact expectations
  Entangler entangler = Entangler::kChain;
  Readout readout = Readout::kQuantumOnly;
  int num_classes = 10;
  /// Sample whole bitstrings from the computational-basis distribution
  /// instead of per-qubit binomial marginals.
  bool joint_sampling = false;

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
  /// Qubits whose <Z> feed the softmax: 0 .. num_classes-1.
  int readout_qubits() const { return num_classes; }
};

struct Prediction {
  std::vector<double> z_values;
  std::vector<double> probs;
  int label = 0;
};

/// The circuit flattened into a sequence of channel applications, with the
/// configured noise placement baked in. Built once per ModelConfig.
class CircuitProgram {
 public:
  enum class Kind { kRotZ, kRotY, kCovariant, kCZ, kComposite };

  struct Op {
    Kind kind = Kind::kRotZ;
    int target = 0;
    int partner = 0;                       // second CZ qubit
    std::size_t param = 0;                 // angle index for rotations
    PhaseCovariantMap map;                 // kCovariant
    PhaseCovariantMap adjoint_map;         // kCovariant
    std::size_t composite = 0;             // index into composites()
  };

  explicit CircuitProgram(const ModelConfig& cfg);

  int num_qubits() const { return num_qubits_; }
  std::size_t num_params() const { return num_params_; }
  const std::vector<Op>& ops() const { return ops_; }
  /// Op index of the rotation driven by each angle.
  const std::vector<std::size_t>& param_ops() const { return param_ops_; }
  const std::vector<std::pair<int, int>>& entangling_pairs() const { return pairs_; }

  /// Schrodinger picture. `shift` is added to the angle `shift_param`.
  void apply_op(ComplexMatrix& rho, std::size_t op, std::span<const double> thetas,
                std::optional<std::size_t> shift_param = std::nullopt, double shift = 0.0) const;
  /// Heisenberg picture: O <- Phi_op^dagger(O).
  void apply_op_adjoint(ComplexMatrix& obs, std::size_t op, std::span<const double> thetas) const;

  void run(ComplexMatrix& rho, std::span<const double> thetas,
           std::optional<std::size_t> shift_param = std::nullopt, double shift = 0.0) const;
  /// Phi^dagger applied to `obs`, i.e. tr(obs Phi(rho)) = tr(run_adjoint(obs) rho).
  void run_adjoint(ComplexMatrix& obs, std::span<const double> thetas) const;

 private:
  int num_qubits_;
  std::size_t num_params_;
  std::vector<Op> ops_;
  std::vector<std::size_t> param_ops_;
  std::vector<std::pair<int, int>> pairs_;
  std::vector<std::shared_ptr<const CompositeNoiseChannel>> composites_;
};

/// Noisy layered circuit applied to rho0.
DensityMatrix forward(const DensityMatrix& rho0, const CircuitParams& params,
                      const ModelConfig& cfg);
DensityMatrix forward(const DensityMatrix& rho0, const CircuitParams& params,
                      const CircuitProgram& program);

/// tr(Z_j rho) for every qubit, clamped to [-1, 1].
std::vector<double> z_expectations(const DensityMatrix& rho);
std::vector<double> z_expectations(const ComplexMatrix& rho, int num_qubits);

/// Diagonal Z_j as a dense observable.
ComplexMatrix z_observable(int qubit, int num_qubits);

/// Real part of tr(a b) for Hermitian a, b.
double hermitian_inner(const ComplexMatrix& a, const ComplexMatrix& b);

/// Per-qubit estimate 2k/N - 1 with k ~ Binomial(N, (1 + z_j)/2).
std::vector<double> sample_expectations(std::span<const double> z, std::size_t shots,
                                        std::mt19937_64& rng);
std::vector<double> sample_expectations(std::span<const double> z, std::size_t shots,
                                        std::uint64_t seed);

/// Estimates from N joint bitstring samples of the diagonal of rho.
std::vector<double> sample_expectations_joint(const ComplexMatrix& rho, int num_qubits,
                                              std::size_t shots, std::mt19937_64& rng);

/// Deterministic stream for (seed, sample, shift) so evaluation order does
/// not affect results.
std::mt19937_64 derived_rng(std::uint64_t seed, std::uint64_t sample, std::uint64_t stream);

std::vector<double> softmax(std::span<const double> x);

/// Readout logits for the configured readout (before softmax).
std::vector<double> readout_logits(std::span<const double> z_est, const CircuitParams& params,
                                   const ModelConfig& cfg);

Prediction predict(std::span<const double> z_est, const CircuitParams& params,
                   const ModelConfig& cfg);

}  // namespace pqvc
