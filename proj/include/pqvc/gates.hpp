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

#include <array>

#include "pqvc/linalg.hpp"

namespace pqvc {

enum class Pauli { X, Y, Z };

/// R_Z(alpha) R_Y(beta) R_Z(gamma); gamma acts first on the state.
struct EulerAngles {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

struct AxisAngle {
  std::array<double, 3> axis{0.0, 0.0, 1.0};
  double theta = 0.0;
};

ComplexMatrix identity2();
ComplexMatrix pauli_matrix(Pauli p);
ComplexMatrix hadamard();

// All rotations use the half-angle convention exp(-i theta A / 2). Global
// phases are never meaningful in this library.

ComplexMatrix rot_named(Pauli axis, double theta);

/// cos(theta/2) I - i sin(theta/2) (n . sigma). Throws std::invalid_argument
/// if |n| deviates from 1 by more than 1e-12.
ComplexMatrix rot_axis(const AxisAngle& rotation);

ComplexMatrix euler_compose(const EulerAngles& angles);

/// Euler angles reproducing a 2x2 unitary up to global phase.
EulerAngles euler_decompose(const ComplexMatrix& u);

ComplexMatrix cz();
/// Control on the first (most significant) qubit.
ComplexMatrix cnot();

/// exp(-i alpha Z kron Z) = diag(e^{-i alpha}, e^{i alpha}, e^{i alpha}, e^{-i alpha}).
ComplexMatrix crosstalk_zz(double alpha);

}  // namespace pqvc
