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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace pqvc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Qubit ordering used everywhere: qubit 0 is the leftmost tensor factor,
// i.e. the most significant bit of a computational-basis index.

/// Largest absolute entrywise difference. Shapes must agree.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b, double atol);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Matrix exponential. Throws std::invalid_argument on non-square input.
ComplexMatrix matexp(const ComplexMatrix& a);

/// Column-stacking vectorization, so vec(A X B) = (B^T kron A) vec(X).
ComplexVector vectorize(const ComplexMatrix& m);
ComplexMatrix devectorize(const ComplexVector& v);

/// Operator acting as `op` on `targets` (targets[0] is the most significant
/// local factor) and as identity on the remaining qubits of an n-qubit space.
ComplexMatrix embed_local(const ComplexMatrix& op, std::span<const int> targets,
                          int num_qubits);

/// Superoperator of X -> U X U^dagger in the column-stacking convention.
ComplexMatrix unitary_superoperator(const ComplexMatrix& u);

/// Trace norm of a Hermitian matrix (sum of absolute eigenvalues).
double trace_norm_hermitian(const ComplexMatrix& m);

class PureState {
 public:
  /// Validates that the length is a power of two and the norm is 1 (1e-12).
  static PureState from_amplitudes(ComplexVector amplitudes);
  /// Basis state |index> on n qubits.
  static PureState basis(int num_qubits, std::size_t index);

  int num_qubits() const { return num_qubits_; }
  const ComplexVector& amplitudes() const { return amplitudes_; }

 private:
  PureState(ComplexVector amplitudes, int num_qubits)
      : amplitudes_(std::move(amplitudes)), num_qubits_(num_qubits) {}

  ComplexVector amplitudes_;
  int num_qubits_ = 0;
};

struct DensityCheck {
  double hermiticity_error = 0.0;
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;

  bool ok() const {
    return hermiticity_error <= 1e-12 && trace_error <= 1e-10 &&
           min_eigenvalue >= -1e-9;
  }
};

DensityCheck check_density(const ComplexMatrix& m);

class DensityMatrix {
 public:
  /// Full validation: Hermitian, unit trace, numerically PSD.
  static DensityMatrix from_matrix(ComplexMatrix m);
  static DensityMatrix from_pure(const PureState& psi);
  static DensityMatrix maximally_mixed(int num_qubits);
  static DensityMatrix basis(int num_qubits, std::size_t index);

  /// Skips the eigenvalue check. For outputs of trace-preserving maps applied
  /// to an already valid state.
  static DensityMatrix trusted(ComplexMatrix m);

  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  const ComplexMatrix& matrix() const { return matrix_; }

  Complex trace() const { return matrix_.trace(); }
  double purity() const;
  DensityCheck check() const { return check_density(matrix_); }

 private:
  DensityMatrix(ComplexMatrix m, int num_qubits)
      : matrix_(std::move(m)), num_qubits_(num_qubits) {}

  ComplexMatrix matrix_;
  int num_qubits_ = 0;
};

/// log2 of a power-of-two dimension; throws std::invalid_argument otherwise.
int qubits_for_dim(std::size_t dim);

// In-place kernels acting on selected qubit axes of a 2^n x 2^n matrix.
// They never build the full 2^n-dimensional operator.
namespace local {

/// Precomputed index geometry for one target list.
class Axes {
 public:
  Axes(std::span<const int> targets, int num_qubits);

  int num_qubits() const { return num_qubits_; }
  int arity() const { return arity_; }
  std::size_t local_dim() const { return offsets_.size(); }
  const std::vector<std::size_t>& offsets() const { return offsets_; }
  const std::vector<std::size_t>& bases() const { return bases_; }
  /// Local (target-subspace) index of a full basis index.
  std::size_t local_index(std::size_t full) const { return local_of_[full]; }

 private:
  int num_qubits_;
  int arity_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> bases_;
  std::vector<std::size_t> local_of_;
};

/// m <- op_T m
void apply_left(ComplexMatrix& m, const ComplexMatrix& op, const Axes& axes);
/// m <- m op_T^dagger
void apply_right_adjoint(ComplexMatrix& m, const ComplexMatrix& op, const Axes& axes);
/// m <- op_T m op_T^dagger
void conjugate(ComplexMatrix& m, const ComplexMatrix& op, const Axes& axes);
/// m <- u m u^dagger for a 2x2 `u` on one qubit.
void conjugate_single(ComplexMatrix& m, const Eigen::Matrix2cd& u, int target, int num_qubits);
/// m <- diag_T m diag_T^dagger for a diagonal local operator (given as its diagonal).
void conjugate_diagonal(ComplexMatrix& m, const ComplexVector& diag, const Axes& axes);
/// m <- sum_i K_i m K_i^dagger
void apply_kraus(ComplexMatrix& m, std::span<const ComplexMatrix> kraus, const Axes& axes);
/// m <- sum_i K_i^dagger m K_i  (Heisenberg-picture adjoint of apply_kraus)
void apply_kraus_adjoint(ComplexMatrix& m, std::span<const ComplexMatrix> kraus,
                         const Axes& axes);
/// Applies a column-stacking superoperator on the target block.
void apply_superoperator(ComplexMatrix& m, const ComplexMatrix& superop, const Axes& axes);

}  // namespace local

}  // namespace pqvc
