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

#include <array>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pqvc/channels.hpp"
#include "pqvc/gates.hpp"
#include "pqvc/vqc.hpp"

namespace pqvc {
namespace {

using testing::kPi;

ModelConfig model(int n, int layers, int classes = 2) {
  ModelConfig m;
  m.n_qubits = n;
  m.n_layers = layers;
  m.num_classes = classes;
  return m;
}

CircuitParams random_params(const ModelConfig& m, std::mt19937_64& rng) {
  CircuitParams p = CircuitParams::zeros(m.n_layers, m.n_qubits);
  p.thetas = testing::random_angles(p.thetas.size(), rng);
  return p;
}

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a - b);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

/// Dense reference: every operation is an explicit 2^n x 2^n matrix product.
ComplexMatrix dense_forward(ComplexMatrix rho, const CircuitParams& p, const ModelConfig& m) {
  const int n = m.n_qubits;
  const auto& s = m.noise.single;
  auto unitary = [&](const ComplexMatrix& u, std::span<const int> t) {
    const ComplexMatrix e = embed_local(u, t, n);
    rho = e * rho * e.adjoint();
  };
  auto kraus = [&](const KrausChannel& ch, int q) {
    const std::array<int, 1> t{q};
    ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
    for (const auto& k : ch.operators) {
      const ComplexMatrix e = embed_local(k, t, n);
      out += e * rho * e.adjoint();
    }
    rho = out;
  };
  auto dephase = [&](int q) {
    // Gaussian average of R_Z(theta) conjugations: |0><1| entries pick up
    // E[e^{-i theta}] = e^{-i mu - sigma^2 / 2}.
    const Complex f = std::exp(Complex(-0.5 * s.sigma * s.sigma, -s.mu));
    ComplexMatrix out = rho;
    const std::size_t bit = std::size_t{1} << (n - 1 - q);
    for (Eigen::Index r = 0; r < rho.rows(); ++r)
      for (Eigen::Index c = 0; c < rho.cols(); ++c) {
        const bool rb = r & bit, cb = c & bit;
        if (!rb && cb) out(r, c) *= f;
        if (rb && !cb) out(r, c) *= std::conj(f);
      }
    rho = out;
  };
  for (int l = 0; l < m.n_layers; ++l) {
    for (int q = 0; q < n; ++q) {
      const std::array<int, 1> t{q};
      const EulerAngles e = p.euler(l, q);
      const std::array<ComplexMatrix, 3> factors{rot_named(Pauli::Z, e.gamma),
                                                 rot_named(Pauli::Y, e.beta),
                                                 rot_named(Pauli::Z, e.alpha)};
      for (const auto& f : factors) {
        unitary(f, t);
        if (s.phase_damping && s.phase_placement == Placement::kPerFactor) dephase(q);
        if (s.depolarizing && s.depol_placement == Placement::kPerFactor)
          kraus(depolarizing_kraus(s.p_depol), q);
      }
      if (s.phase_damping && s.phase_placement == Placement::kPerGate) dephase(q);
      if (s.depolarizing && s.depol_placement == Placement::kPerGate)
        kraus(depolarizing_kraus(s.p_depol), q);
      if (s.thermal) kraus(thermal_kraus(s.t_tilde, s.gamma), q);
    }
    std::vector<std::pair<int, int>> pairs;
    for (int q = 0; q + 1 < n; ++q) pairs.emplace_back(q, q + 1);
    if (m.entangler == Entangler::kRing) pairs.emplace_back(n - 1, 0);
    for (const auto& [a, b] : pairs) {
      const std::array<int, 2> t{a, b};
      unitary(cz(), t);
      if (m.noise.two_qubit) {
        rho = two_qubit_noise_channel(m.noise, a, b, n).apply(DensityMatrix::trusted(rho)).matrix();
      }
    }
  }
  return rho;
}

ModelConfig noisy_model(int n, int layers, std::mt19937_64& rng, int variant) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ModelConfig m = model(n, layers);
  auto& s = m.noise.single;
  s.depolarizing = true;
  s.p_depol = 0.2 * u(rng);
  s.depol_placement = variant & 1 ? Placement::kPerFactor : Placement::kPerGate;
  s.phase_damping = true;
  s.mu = 2 * kPi * u(rng);
  s.sigma = u(rng);
  s.phase_placement = variant & 2 ? Placement::kPerGate : Placement::kPerFactor;
  s.thermal = true;
  s.t_tilde = 0.01 + u(rng);
  s.gamma = 0.3 * u(rng);
  if (variant & 4) m.noise.two_qubit = TwoQubitNoise{0.05 * u(rng), 0.2 * u(rng)};
  if (variant & 8 && n >= 3) m.entangler = Entangler::kRing;
  return m;
}

// ---- forward ---------------------------------------------------------------

TEST(Forward, ZeroLayersLeavesStateUnchanged) {
  std::mt19937_64 rng(1);
  const DensityMatrix rho = DensityMatrix::from_matrix(testing::random_rho(3, rng));
  ModelConfig m = model(3, 0);
  m.noise.single.depolarizing = true;
  m.noise.single.p_depol = 0.3;
  EXPECT_EQ(forward(rho, CircuitParams::zeros(0, 3), m).matrix(), rho.matrix());
}

TEST(Forward, ZeroAnglesApplyOnlyEntanglers) {
  std::mt19937_64 rng(2);
  const DensityMatrix rho = DensityMatrix::from_matrix(testing::random_rho(3, rng));
  const ModelConfig m = model(3, 2);
  const std::array<int, 2> a{0, 1}, b{1, 2};
  const ComplexMatrix w = embed_local(cz(), b, 3) * embed_local(cz(), a, 3);
  const ComplexMatrix expected = w * w * rho.matrix() * (w * w).adjoint();
  EXPECT_LT(max_abs_diff(forward(rho, CircuitParams::zeros(2, 3), m).matrix(), expected), 1e-14);
}

TEST(Forward, FullDepolarizationReachesMaximallyMixed) {
  std::mt19937_64 rng(3);
  ModelConfig m = model(2, 2);
  m.noise.single.depolarizing = true;
  m.noise.single.p_depol = 0.75;
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const DensityMatrix rho = DensityMatrix::from_matrix(testing::random_rho(2, rng));
    const auto out = forward(rho, random_params(m, rng), m);
    worst = std::max(worst, trace_distance(out.matrix(), DensityMatrix::maximally_mixed(2).matrix()));
  }
  // p = 3/4 erases each qubit exactly, so the observed distance is roundoff.
  EXPECT_LT(worst, 1e-12);
}

TEST(Forward, RejectsDimensionMismatch) {
  EXPECT_THROW(forward(DensityMatrix::basis(2, 0), CircuitParams::zeros(1, 3), model(3, 1)),
               std::invalid_argument);
}

TEST(Forward, NoiseFreeMatchesStateVectorOracle) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 3;
    ModelConfig m = model(n, 1 + trial % 4);
    if (trial % 5 == 4 && n >= 3) m.entangler = Entangler::kRing;
    const CircuitParams p = random_params(m, rng);
    const auto psi0 = testing::random_amplitudes(n, rng);
    const auto psi = testing::run_circuit(psi0, p.thetas, n, m.n_layers, m.entangler == Entangler::kRing);
    const DensityMatrix rho0 = DensityMatrix::from_pure(PureState::from_amplitudes(testing::to_vector(psi0)));
    EXPECT_LT(max_abs_diff(forward(rho0, p, m).matrix(), testing::outer(psi)), 1e-10) << "trial " << trial;
  }
}

TEST(Forward, NoisyMatchesDenseOracle) {
  std::mt19937_64 rng(5);
  for (int variant = 0; variant < 16; ++variant) {
    const int n = 3;
    const ModelConfig m = noisy_model(n, 2, rng, variant);
    const CircuitParams p = random_params(m, rng);
    const ComplexMatrix rho = testing::random_rho(n, rng);
    const auto got = forward(DensityMatrix::from_matrix(rho), p, m);
    EXPECT_LT(max_abs_diff(got.matrix(), dense_forward(rho, p, m)), 1e-12) << "variant " << variant;
  }
}

TEST(Forward, PreservesTraceAndPositivity) {
  std::mt19937_64 rng(6);
  for (int variant = 0; variant < 16; ++variant) {
    const ModelConfig m = noisy_model(4, 3, rng, variant);
    const auto out = forward(DensityMatrix::from_matrix(testing::random_rho(4, rng)), random_params(m, rng), m);
    const auto c = out.check();
    EXPECT_LT(c.trace_error, 1e-9);
    EXPECT_GE(c.min_eigenvalue, -1e-9);
  }
}

TEST(Forward, AdjointIsDualOfForward) {
  std::mt19937_64 rng(7);
  for (int variant = 0; variant < 16; ++variant) {
    const ModelConfig m = noisy_model(3, 2, rng, variant);
    const CircuitProgram prog(m);
    const CircuitParams p = random_params(m, rng);
    const ComplexMatrix rho = testing::random_rho(3, rng);
    const ComplexMatrix obs = z_observable(variant % 3, 3);
    ComplexMatrix evolved = rho;
    prog.run(evolved, p.thetas);
    ComplexMatrix heis = obs;
    prog.run_adjoint(heis, p.thetas);
    EXPECT_NEAR(hermitian_inner(obs, evolved), hermitian_inner(heis, rho), 1e-12);
  }
}

TEST(Forward, ShiftedRunEqualsShiftedParameters) {
  std::mt19937_64 rng(8);
  const ModelConfig m = noisy_model(3, 2, rng, 5);
  const CircuitProgram prog(m);
  CircuitParams p = random_params(m, rng);
  const ComplexMatrix rho = testing::random_rho(3, rng);
  ComplexMatrix a = rho;
  prog.run(a, p.thetas, 7, kPi / 2);
  p.thetas[7] += kPi / 2;
  ComplexMatrix b = rho;
  prog.run(b, p.thetas);
  EXPECT_LT(max_abs_diff(a, b), 1e-14);
}

TEST(Forward, ExactPipelineIsDeterministic) {
  std::mt19937_64 rng(9);
  const ModelConfig m = noisy_model(3, 2, rng, 7);
  const CircuitParams p = random_params(m, rng);
  const DensityMatrix rho = DensityMatrix::from_matrix(testing::random_rho(3, rng));
  const auto z1 = z_expectations(forward(rho, p, m));
  const auto z2 = z_expectations(forward(rho, p, m));
  EXPECT_EQ(z1, z2);
  const auto p1 = predict(z1, p, m), p2 = predict(z2, p, m);
  EXPECT_EQ(p1.probs, p2.probs);
  EXPECT_EQ(p1.label, p2.label);
}

// ---- expectations ----------------------------------------------------------

TEST(ZExpectations, GroundStateIsAllPlusOne) {
  EXPECT_EQ(z_expectations(DensityMatrix::basis(3, 0)), (std::vector<double>{1, 1, 1}));
}

TEST(ZExpectations, MaximallyMixedIsZero) {
  for (double z : z_expectations(DensityMatrix::maximally_mixed(3))) EXPECT_NEAR(z, 0.0, 1e-15);
}

TEST(ZExpectations, PlusTensorOne) {
  const ComplexMatrix plus = testing::mat({{0.5, 0.5}, {0.5, 0.5}});
  const ComplexMatrix one = DensityMatrix::basis(1, 1).matrix();
  const auto z = z_expectations(DensityMatrix::from_matrix(kron(plus, one)));
  EXPECT_NEAR(z[0], 0.0, 1e-15);
  EXPECT_NEAR(z[1], -1.0, 1e-15);
}

TEST(ZExpectations, MatchesStateVectorAndObservable) {
  std::mt19937_64 rng(10);
  const auto psi = testing::random_amplitudes(4, rng);
  const ComplexMatrix rho = testing::outer(psi);
  const auto ref = testing::z_from_amplitudes(psi, 4);
  const auto got = z_expectations(rho, 4);
  for (int j = 0; j < 4; ++j) {
    EXPECT_NEAR(got[j], ref[j], 1e-14);
    EXPECT_NEAR(hermitian_inner(z_observable(j, 4), rho), ref[j], 1e-14);
  }
}

// ---- shot sampling ---------------------------------------------------------

TEST(Sampling, DegenerateExpectationsAreExact) {
  const std::vector<double> z{1.0, -1.0};
  for (std::size_t shots : {1u, 7u, 10000u}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      EXPECT_EQ(sample_expectations(z, shots, seed), z);
    }
  }
}

TEST(Sampling, ZeroExpectationConcentrates) {
  // sd = 2 sqrt(p (1 - p) / N) = 0.01, so +-0.04 is four sigma.
  const std::vector<double> z{0.0};
  int outside = 0;
  const int seeds = 5000;
  for (int seed = 0; seed < seeds; ++seed) {
    if (std::abs(sample_expectations(z, 10000, seed)[0]) > 0.04) ++outside;
  }
  EXPECT_LE(outside, seeds / 1000);
}

TEST(Sampling, EstimatesAreUnbiasedWithBinomialSpread) {
  const std::vector<double> z{0.3, -0.6};
  const std::size_t shots = 400;
  const int reps = 4000;
  std::mt19937_64 rng(11);
  double mean0 = 0, mean1 = 0, sq0 = 0;
  for (int r = 0; r < reps; ++r) {
    const auto e = sample_expectations(z, shots, rng);
    mean0 += e[0];
    mean1 += e[1];
    sq0 += (e[0] - z[0]) * (e[0] - z[0]);
  }
  mean0 /= reps;
  mean1 /= reps;
  const double sd0 = 2 * std::sqrt(0.65 * 0.35 / shots);
  EXPECT_NEAR(mean0, 0.3, 4 * sd0 / std::sqrt(reps));
  EXPECT_NEAR(mean1, -0.6, 4 * sd0 / std::sqrt(reps));
  EXPECT_NEAR(std::sqrt(sq0 / reps), sd0, 0.1 * sd0);
}

TEST(Sampling, SeededStreamsAreReproducible) {
  const std::vector<double> z{0.1, 0.2, -0.3};
  EXPECT_EQ(sample_expectations(z, 1000, 42), sample_expectations(z, 1000, 42));
  auto a = derived_rng(5, 17, 3), b = derived_rng(5, 17, 3), c = derived_rng(5, 17, 4);
  EXPECT_EQ(a(), b());
  EXPECT_NE(derived_rng(5, 17, 3)(), c());
}

TEST(Sampling, JointSamplingMatchesMarginals) {
  std::mt19937_64 rng(12);
  const auto psi = testing::random_amplitudes(3, rng);
  const ComplexMatrix rho = testing::outer(psi);
  const auto z = testing::z_from_amplitudes(psi, 3);
  const std::size_t shots = 200000;
  const auto est = sample_expectations_joint(rho, 3, shots, rng);
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(est[j], z[j], 5 * 2 / std::sqrt(double(shots)));
}

// ---- prediction ------------------------------------------------------------

TEST(Predict, EqualExpectationsGiveUniformProbabilities) {
  const ModelConfig m = model(10, 1, 10);
  const std::vector<double> z(10, 0.37);
  const auto pred = predict(z, CircuitParams::zeros(1, 10), m);
  for (double p : pred.probs) EXPECT_NEAR(p, 0.1, 1e-15);
  EXPECT_EQ(pred.label, 0);  // tie goes to the lowest index
}

TEST(Predict, SingleExcitedQubit) {
  const ModelConfig m = model(10, 1, 10);
  std::vector<double> z(10, 0.0);
  z[0] = 1.0;
  const auto pred = predict(z, CircuitParams::zeros(1, 10), m);
  EXPECT_NEAR(pred.probs[0], std::exp(1.0) / (std::exp(1.0) + 9.0), 1e-15);
  EXPECT_NEAR(pred.probs[0], 0.2320, 5e-5);
  EXPECT_EQ(pred.label, 0);
}

TEST(Predict, TransparentClassicalLayerMatchesQuantumReadout) {
  ModelConfig q = model(6, 1, 4);
  ModelConfig c = q;
  c.readout = Readout::kClassical;
  CircuitParams p = CircuitParams::zeros(1, 6);
  p.classical = ClassicalLayer{std::vector<double>(4, 1.0), std::vector<double>(4, 0.0)};
  const std::vector<double> z{0.1, -0.4, 0.9, 0.2, 0.5, -0.5};
  const auto a = predict(z, p, q), b = predict(z, p, c);
  EXPECT_EQ(a.probs, b.probs);
  EXPECT_EQ(a.label, b.label);
}

TEST(Predict, ClassicalLayerIsElementwise) {
  ModelConfig c = model(4, 1, 3);
  c.readout = Readout::kClassical;
  CircuitParams p = CircuitParams::zeros(1, 4);
  p.classical = ClassicalLayer{{2.0, -1.0, 0.5}, {0.1, 0.2, -0.3}};
  const std::vector<double> z{0.5, 0.5, -1.0, 0.9};
  const auto y = readout_logits(z, p, c);
  EXPECT_DOUBLE_EQ(y[0], 1.1);
  EXPECT_DOUBLE_EQ(y[1], -0.3);
  EXPECT_DOUBLE_EQ(y[2], -0.8);
}

TEST(Predict, RejectsShapeMismatch) {
  ModelConfig c = model(4, 1, 3);
  c.readout = Readout::kClassical;
  const std::vector<double> z{0.5, 0.5, -1.0, 0.9};
  EXPECT_THROW(readout_logits(z, CircuitParams::zeros(1, 4), c), std::invalid_argument);
  const std::vector<double> short_z{0.5};
  EXPECT_THROW(predict(short_z, CircuitParams::zeros(1, 4), model(4, 1, 3)), std::invalid_argument);
}

TEST(Predict, ConfigRequiresOneQubitPerClass) {
  EXPECT_THROW(model(4, 1, 10).validate(), std::invalid_argument);
  EXPECT_NO_THROW(model(10, 1, 10).validate());
}

TEST(Properties, SoftmaxShiftInvariance) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> z(10), shifted(10);
    const double c = 5 * u(rng);
    for (int i = 0; i < 10; ++i) shifted[i] = (z[i] = u(rng)) + c;
    const auto a = softmax(z), b = softmax(shifted);
    double sum = 0.0;
    for (int i = 0; i < 10; ++i) {
      EXPECT_NEAR(a[i], b[i], 1e-12);
      EXPECT_GT(a[i], 0.0);
      sum += a[i];
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(Properties, ArgmaxInvariantUnderPositiveScaling) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-1.0, 1.0), s(0.01, 1.0);
  const ModelConfig m = model(10, 1, 10);
  const CircuitParams p = CircuitParams::zeros(1, 10);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> z(10), scaled(10);
    const double k = s(rng);
    for (int i = 0; i < 10; ++i) scaled[i] = k * (z[i] = u(rng));
    EXPECT_EQ(predict(z, p, m).label, predict(scaled, p, m).label);
  }
}

}  // namespace
}  // namespace pqvc
