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

#include "pqvc/gates.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pqvc {

namespace {
constexpr Complex kI{0.0, 1.0};
}

ComplexMatrix identity2() { return ComplexMatrix::Identity(2, 2); }

ComplexMatrix pauli_matrix(Pauli p) {
  ComplexMatrix m(2, 2);
  switch (p) {
    case Pauli::X:
      m << 0.0, 1.0, 1.0, 0.0;
      break;
    case Pauli::Y:
      m << 0.0, -kI, kI, 0.0;
      break;
    case Pauli::Z:
      m << 1.0, 0.0, 0.0, -1.0;
      break;
  }
  return m;
}

ComplexMatrix hadamard() {
  ComplexMatrix m(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  m << s, s, s, -s;
  return m;
}

ComplexMatrix rot_named(Pauli axis, double theta) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  ComplexMatrix m(2, 2);
  switch (axis) {
    case Pauli::X:
      m << c, -kI * s, -kI * s, c;
      break;
    case Pauli::Y:
      m << c, -s, s, c;
      break;
    case Pauli::Z:
      m << std::exp(-kI * (theta / 2.0)), 0.0, 0.0, std::exp(kI * (theta / 2.0));
      break;
  }
  return m;
}

ComplexMatrix rot_axis(const AxisAngle& rotation) {
  const auto& n = rotation.axis;
  const double norm = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
  if (!(std::abs(norm - 1.0) <= 1e-12)) {
    throw std::invalid_argument("rotation axis is not a unit vector (norm " +
                                std::to_string(norm) + ")");
  }
  const ComplexMatrix generator = n[0] * pauli_matrix(Pauli::X) +
                                  n[1] * pauli_matrix(Pauli::Y) +
                                  n[2] * pauli_matrix(Pauli::Z);
  return std::cos(rotation.theta / 2.0) * identity2() -
         kI * std::sin(rotation.theta / 2.0) * generator;
}

ComplexMatrix euler_compose(const EulerAngles& angles) {
  return rot_named(Pauli::Z, angles.alpha) * rot_named(Pauli::Y, angles.beta) *
         rot_named(Pauli::Z, angles.gamma);
}

EulerAngles euler_decompose(const ComplexMatrix& u) {
  if (u.rows() != 2 || u.cols() != 2) throw std::invalid_argument("euler_decompose: need 2x2");
  // Strip the global phase so that det = 1, then match
  //   [[ e^{-i(a+g)/2} cos(b/2), -e^{-i(a-g)/2} sin(b/2)],
  //    [ e^{ i(a-g)/2} sin(b/2),  e^{ i(a+g)/2} cos(b/2)]].
  const Complex det = u.determinant();
  const ComplexMatrix v = u / std::sqrt(det);
  const double c = std::abs(v(0, 0));
  const double s = std::abs(v(1, 0));
  EulerAngles e;
  e.beta = 2.0 * std::atan2(s, c);
  const double sum = c > 1e-12 ? 2.0 * std::arg(v(1, 1)) : 0.0;    // a + g
  const double diff = s > 1e-12 ? 2.0 * std::arg(v(1, 0)) : 0.0;   // a - g
  e.alpha = 0.5 * (sum + diff);
  e.gamma = 0.5 * (sum - diff);
  return e;
}

ComplexMatrix cz() {
  ComplexMatrix m = ComplexMatrix::Identity(4, 4);
  m(3, 3) = -1.0;
  return m;
}

ComplexMatrix cnot() {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = 1.0;
  m(1, 1) = 1.0;
  m(2, 3) = 1.0;
  m(3, 2) = 1.0;
  return m;
}

ComplexMatrix crosstalk_zz(double alpha) {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  const Complex minus = std::exp(-kI * alpha);
  const Complex plus = std::exp(kI * alpha);
  m(0, 0) = minus;
  m(1, 1) = plus;
  m(2, 2) = plus;
  m(3, 3) = minus;
  return m;
}

}  // namespace pqvc
