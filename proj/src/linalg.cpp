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

#include "pqvc/linalg.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace pqvc {

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  }
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b, double atol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return max_abs_diff(a, b) <= atol;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.size() == 0 || b.size() == 0) {
    throw std::invalid_argument("kron: empty operand");
  }
  ComplexMatrix out = Eigen::kroneckerProduct(a, b);
  return out;
}

ComplexMatrix matexp(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("matexp: matrix is " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + ", expected square");
  }
  if (a.size() == 0) return a;
  ComplexMatrix out = a.exp();
  return out;
}

ComplexVector vectorize(const ComplexMatrix& m) {
  ComplexVector v(m.size());
  // Eigen storage is column-major, which is exactly column stacking.
  std::copy(m.data(), m.data() + m.size(), v.data());
  return v;
}

ComplexMatrix devectorize(const ComplexVector& v) {
  const auto len = static_cast<std::size_t>(v.size());
  const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(len))));
  if (side * side != len) {
    throw std::invalid_argument("devectorize: length " + std::to_string(len) +
                                " is not a perfect square");
  }
  ComplexMatrix m(side, side);
  std::copy(v.data(), v.data() + v.size(), m.data());
  return m;
}

int qubits_for_dim(std::size_t dim) {
  if (dim == 0 || !std::has_single_bit(dim)) {
    throw std::invalid_argument("dimension " + std::to_string(dim) + " is not a power of two");
  }
  return std::countr_zero(dim);
}

namespace {

void check_targets(std::span<const int> targets, int num_qubits) {
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] < 0 || targets[i] >= num_qubits) {
      throw std::invalid_argument("qubit index " + std::to_string(targets[i]) +
                                  " out of range for " + std::to_string(num_qubits) +
                                  " qubits");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (targets[i] == targets[j]) {
        throw std::invalid_argument("duplicate target qubit " + std::to_string(targets[i]));
      }
    }
  }
}

}  // namespace

ComplexMatrix embed_local(const ComplexMatrix& op, std::span<const int> targets,
                          int num_qubits) {
  check_targets(targets, num_qubits);
  const std::size_t d = std::size_t{1} << targets.size();
  if (static_cast<std::size_t>(op.rows()) != d || static_cast<std::size_t>(op.cols()) != d) {
    throw std::invalid_argument("embed_local: operator dimension " + std::to_string(op.rows()) +
                                " does not match " + std::to_string(targets.size()) +
                                " target qubit(s)");
  }
  const local::Axes axes(targets, num_qubits);
  const std::size_t dim = std::size_t{1} << num_qubits;
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  for (std::size_t base : axes.bases()) {
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) {
        out(base + axes.offsets()[a], base + axes.offsets()[b]) = op(a, b);
      }
    }
  }
  return out;
}

ComplexMatrix unitary_superoperator(const ComplexMatrix& u) {
  return kron(u.conjugate(), u);
}

double trace_norm_hermitian(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().sum();
}

// ---------------------------------------------------------------------------

PureState PureState::from_amplitudes(ComplexVector amplitudes) {
  const int n = qubits_for_dim(static_cast<std::size_t>(amplitudes.size()));
  const double norm2 = amplitudes.squaredNorm();
  if (std::abs(norm2 - 1.0) > 1e-12) {
    throw std::invalid_argument("state is not normalized: squared norm " +
                                std::to_string(norm2));
  }
  return PureState(std::move(amplitudes), n);
}

PureState PureState::basis(int num_qubits, std::size_t index) {
  const std::size_t dim = std::size_t{1} << num_qubits;
  if (index >= dim) throw std::invalid_argument("basis index out of range");
  ComplexVector v = ComplexVector::Zero(dim);
  v(index) = 1.0;
  return PureState(std::move(v), num_qubits);
}

DensityCheck check_density(const ComplexMatrix& m) {
  DensityCheck c;
  c.hermiticity_error = max_abs_diff(m, m.adjoint());
  c.trace_error = std::abs(m.trace() - Complex(1.0, 0.0));
  const ComplexMatrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm, Eigen::EigenvaluesOnly);
  c.min_eigenvalue = solver.eigenvalues().minCoeff();
  return c;
}

DensityMatrix DensityMatrix::from_matrix(ComplexMatrix m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("density matrix must be square");
  const int n = qubits_for_dim(static_cast<std::size_t>(m.rows()));
  const DensityCheck c = check_density(m);
  if (!c.ok()) {
    throw std::invalid_argument(
        "not a density matrix: hermiticity error " + std::to_string(c.hermiticity_error) +
        ", trace error " + std::to_string(c.trace_error) + ", min eigenvalue " +
        std::to_string(c.min_eigenvalue));
  }
  return DensityMatrix(std::move(m), n);
}

DensityMatrix DensityMatrix::trusted(ComplexMatrix m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("density matrix must be square");
  const int n = qubits_for_dim(static_cast<std::size_t>(m.rows()));
  return DensityMatrix(std::move(m), n);
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  const ComplexVector& a = psi.amplitudes();
  return DensityMatrix(a * a.adjoint(), psi.num_qubits());
}

DensityMatrix DensityMatrix::maximally_mixed(int num_qubits) {
  const std::size_t dim = std::size_t{1} << num_qubits;
  ComplexMatrix m = ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim);
  return DensityMatrix(std::move(m), num_qubits);
}

DensityMatrix DensityMatrix::basis(int num_qubits, std::size_t index) {
  return from_pure(PureState::basis(num_qubits, index));
}

double DensityMatrix::purity() const {
  // trace(rho^2) = sum |rho_ij|^2 for Hermitian rho.
  return matrix_.squaredNorm();
}

// ---------------------------------------------------------------------------

namespace local {

Axes::Axes(std::span<const int> targets, int num_qubits)
    : num_qubits_(num_qubits), arity_(static_cast<int>(targets.size())) {
  check_targets(targets, num_qubits);
  const std::size_t d = std::size_t{1} << targets.size();
  const std::size_t dim = std::size_t{1} << num_qubits;
  offsets_.resize(d);
  std::size_t mask = 0;
  for (std::size_t a = 0; a < d; ++a) {
    std::size_t off = 0;
    for (std::size_t j = 0; j < targets.size(); ++j) {
      const std::size_t bit = (a >> (targets.size() - 1 - j)) & 1U;
      off |= bit << (num_qubits - 1 - targets[j]);
    }
    offsets_[a] = off;
  }
  for (int t : targets) mask |= std::size_t{1} << (num_qubits - 1 - t);
  bases_.reserve(dim / d);
  local_of_.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    if ((i & mask) == 0) bases_.push_back(i);
    std::size_t a = 0;
    for (std::size_t j = 0; j < targets.size(); ++j) {
      a = (a << 1) | ((i >> (num_qubits - 1 - targets[j])) & 1U);
    }
    local_of_[i] = a;
  }
}

namespace {

void check_shape(const ComplexMatrix& m, const ComplexMatrix& op, const Axes& axes) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << axes.num_qubits());
  if (m.rows() != dim || m.cols() != dim) {
    throw std::invalid_argument("matrix dimension does not match qubit count");
  }
  const auto d = static_cast<Eigen::Index>(axes.local_dim());
  if (op.rows() != d || op.cols() != d) {
    throw std::invalid_argument("local operator dimension does not match target count");
  }
}

}  // namespace

void apply_left(ComplexMatrix& m, const ComplexMatrix& op, const Axes& axes) {
  check_shape(m, op, axes);
  const std::size_t dim = static_cast<std::size_t>(m.rows());
  const std::size_t d = axes.local_dim();
  const auto& off = axes.offsets();
  std::vector<Complex> v(d);
  for (std::size_t c = 0; c < dim; ++c) {
    Complex* col = m.data() + c * dim;
    for (std::size_t base : axes.bases()) {
      for (std::size_t a = 0; a < d; ++a) v[a] = col[base + off[a]];
      for (std::size_t a = 0; a < d; ++a) {
        Complex acc = 0.0;
        for (std::size_t b = 0; b < d; ++b) acc += op(a, b) * v[b];
        col[base + off[a]] = acc;
      }
    }
  }
}

void apply_right_adjoint(ComplexMatrix& m, const ComplexMatrix& op, const Axes& axes) {
  check_shape(m, op, axes);
  const std::size_t dim = static_cast<std::size_t>(m.rows());
  const std::size_t d = axes.local_dim();
  const auto& off = axes.offsets();
  // Column j_a of (m op^dagger) is sum_b conj(op(a, b)) * column j_b of m.
  const ComplexMatrix coeff = op.conjugate();
  std::vector<Complex> tmp(d * dim);
  for (std::size_t base : axes.bases()) {
    for (std::size_t b = 0; b < d; ++b) {
      const Complex* src = m.data() + (base + off[b]) * dim;
      std::copy(src, src + dim, tmp.begin() + static_cast<std::ptrdiff_t>(b * dim));
    }
    for (std::size_t a = 0; a < d; ++a) {
      Complex* dst = m.data() + (base + off[a]) * dim;
      std::fill(dst, dst + dim, Complex(0.0, 0.0));
      for (std::size_t b = 0; b < d; ++b) {
        const Complex w = coeff(a, b);
        if (w == Complex(0.0, 0.0)) continue;
        const Complex* src = tmp.data() + b * dim;
        for (std::size_t r = 0; r < dim; ++r) dst[r] += w * src[r];
      }
    }
  }
}

void conjugate(ComplexMatrix& m, const ComplexMatrix& op, const Axes& axes) {
  apply_left(m, op, axes);
  apply_right_adjoint(m, op, axes);
}

void conjugate_single(ComplexMatrix& m, const Eigen::Matrix2cd& u, int target,
                      int num_qubits) {
  const std::size_t dim = static_cast<std::size_t>(m.rows());
  if (target < 0 || target >= num_qubits || dim != (std::size_t{1} << num_qubits)) {
    throw std::invalid_argument("conjugate_single: bad target or dimension");
  }
  const std::size_t bit = std::size_t{1} << (num_qubits - 1 - target);
  const Complex u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
  for (std::size_t c = 0; c < dim; ++c) {
    Complex* col = m.data() + c * dim;
    for (std::size_t r = 0; r < dim; ++r) {
      if (r & bit) continue;
      const Complex a = col[r];
      const Complex b = col[r | bit];
      col[r] = u00 * a + u01 * b;
      col[r | bit] = u10 * a + u11 * b;
    }
  }
  const Complex v00 = std::conj(u00), v01 = std::conj(u01), v10 = std::conj(u10),
                v11 = std::conj(u11);
  for (std::size_t c = 0; c < dim; ++c) {
    if (c & bit) continue;
    Complex* c0 = m.data() + c * dim;
    Complex* c1 = m.data() + (c | bit) * dim;
    for (std::size_t r = 0; r < dim; ++r) {
      const Complex a = c0[r];
      const Complex b = c1[r];
      c0[r] = v00 * a + v01 * b;
      c1[r] = v10 * a + v11 * b;
    }
  }
}

void conjugate_diagonal(ComplexMatrix& m, const ComplexVector& diag, const Axes& axes) {
  const std::size_t dim = static_cast<std::size_t>(m.rows());
  if (static_cast<std::size_t>(diag.size()) != axes.local_dim() ||
      dim != (std::size_t{1} << axes.num_qubits())) {
    throw std::invalid_argument("conjugate_diagonal: dimension mismatch");
  }
  std::vector<Complex> phase(dim);
  for (std::size_t i = 0; i < dim; ++i) phase[i] = diag(axes.local_index(i));
  for (std::size_t c = 0; c < dim; ++c) {
    const Complex pc = std::conj(phase[c]);
    Complex* col = m.data() + c * dim;
    for (std::size_t r = 0; r < dim; ++r) col[r] *= phase[r] * pc;
  }
}

void apply_kraus(ComplexMatrix& m, std::span<const ComplexMatrix> kraus, const Axes& axes) {
  ComplexMatrix acc = ComplexMatrix::Zero(m.rows(), m.cols());
  ComplexMatrix term;
  for (const auto& k : kraus) {
    term = m;
    conjugate(term, k, axes);
    acc += term;
  }
  m = std::move(acc);
}

void apply_kraus_adjoint(ComplexMatrix& m, std::span<const ComplexMatrix> kraus,
                         const Axes& axes) {
  ComplexMatrix acc = ComplexMatrix::Zero(m.rows(), m.cols());
  ComplexMatrix term;
  for (const auto& k : kraus) {
    term = m;
    conjugate(term, k.adjoint(), axes);
    acc += term;
  }
  m = std::move(acc);
}

void apply_superoperator(ComplexMatrix& m, const ComplexMatrix& superop, const Axes& axes) {
  const std::size_t dim = static_cast<std::size_t>(m.rows());
  const std::size_t d = axes.local_dim();
  if (static_cast<std::size_t>(superop.rows()) != d * d ||
      static_cast<std::size_t>(superop.cols()) != d * d ||
      dim != (std::size_t{1} << axes.num_qubits())) {
    throw std::invalid_argument("apply_superoperator: dimension mismatch");
  }
  const auto& off = axes.offsets();
  ComplexVector block(d * d);
  ComplexVector out(d * d);
  for (std::size_t rb : axes.bases()) {
    for (std::size_t cb : axes.bases()) {
      for (std::size_t b = 0; b < d; ++b) {
        for (std::size_t a = 0; a < d; ++a) block(b * d + a) = m(rb + off[a], cb + off[b]);
      }
      out.noalias() = superop * block;
      for (std::size_t b = 0; b < d; ++b) {
        for (std::size_t a = 0; a < d; ++a) m(rb + off[a], cb + off[b]) = out(b * d + a);
      }
    }
  }
}

}  // namespace local

}  // namespace pqvc
