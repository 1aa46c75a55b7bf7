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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pqvc/data.hpp"
#include "pqvc/training.hpp"

namespace pqvc {
namespace {

using testing::kPi;

ModelConfig model(int n, int layers, int classes) {
  ModelConfig m;
  m.n_qubits = n;
  m.n_layers = layers;
  m.num_classes = classes;
  return m;
}

std::vector<EncodedState> random_batch(int n, int classes, std::size_t count, std::mt19937_64& rng) {
  std::vector<EncodedState> out;
  for (std::size_t i = 0; i < count; ++i) {
    const auto psi = testing::random_amplitudes(n, rng);
    out.push_back({PureState::from_amplitudes(testing::to_vector(psi)),
                   static_cast<int>(i % static_cast<std::size_t>(classes))});
  }
  return out;
}

/// Independent loss: state-vector circuit, softmax over the first K <Z_j>,
/// batch-mean cross-entropy. Noise-free models only.
double oracle_loss(const std::vector<double>& flat, const ModelConfig& m,
                   const std::vector<EncodedState>& batch) {
  const std::size_t nq = static_cast<std::size_t>(m.n_layers) * m.n_qubits * 3;
  const std::vector<double> thetas(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(nq));
  const int k = m.num_classes;
  double total = 0.0;
  for (const auto& s : batch) {
    testing::Amplitudes psi(s.state.amplitudes().data(),
                            s.state.amplitudes().data() + s.state.amplitudes().size());
    const auto z = testing::z_from_amplitudes(testing::run_circuit(psi, thetas, m.n_qubits, m.n_layers),
                                              m.n_qubits);
    std::vector<double> y(z.begin(), z.begin() + k);
    if (m.readout == Readout::kClassical) {
      for (int i = 0; i < k; ++i) y[i] = flat[nq + i] * y[i] + flat[nq + k + i];
    }
    double norm = 0.0;
    for (double v : y) norm += std::exp(v);
    total += -(y[s.source_label] - std::log(norm));
  }
  return total / batch.size();
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// ---- cross-entropy ---------------------------------------------------------

TEST(CrossEntropy, CertainCorrectPredictionIsZero) {
  const std::vector<double> p{0.0, 1.0, 0.0};
  EXPECT_EQ(cross_entropy(p, 1), 0.0);
}

TEST(CrossEntropy, UniformTenClasses) {
  const std::vector<double> p(10, 0.1);
  EXPECT_NEAR(cross_entropy(p, 4), std::log(10.0), 1e-15);
  EXPECT_NEAR(cross_entropy(p, 4), 2.3026, 5e-5);
}

TEST(CrossEntropy, SoftmaxExampleValue) {
  const std::vector<double> p{0.2320, 0.2560, 0.2560, 0.2560};
  EXPECT_NEAR(cross_entropy(p, 0), -std::log(0.2320), 1e-15);
  EXPECT_NEAR(cross_entropy(p, 0), 1.4610, 5e-5);
}

TEST(CrossEntropy, ZeroProbabilityIsFlooredAndCounted) {
  const std::vector<double> p{1.0, 0.0};
  LossDiagnostics diag;
  EXPECT_NEAR(cross_entropy(p, 1, &diag), -std::log(kProbabilityFloor), 1e-12);
  EXPECT_EQ(diag.floored, 1u);
  EXPECT_THROW(cross_entropy(p, 2), std::invalid_argument);
}

// ---- ADAM ------------------------------------------------------------------

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  std::vector<double> params{0.3, -1.2, 2.0};
  const auto before = params;
  AdamState st = AdamState::zeros(3);
  adam_step(st, params, std::vector<double>(3, 0.0), 0.01, {});
  EXPECT_EQ(params, before);
}

TEST(Adam, FirstUnitStepMovesByLearningRate) {
  std::vector<double> params(4, 0.0);
  AdamState st = AdamState::zeros(4);
  const double lr = 0.005;
  adam_step(st, params, std::vector<double>(4, 1.0), lr, {});
  for (double p : params) EXPECT_NEAR(p, -lr / (1.0 + 1e-8), 1e-15);
  EXPECT_EQ(st.step, 1u);
}

TEST(Adam, OppositeGradientsKeepDriftBounded) {
  std::vector<double> params{0.0};
  AdamState st = AdamState::zeros(1);
  const double lr = 0.01;
  adam_step(st, params, std::vector<double>{0.7}, lr, {});
  adam_step(st, params, std::vector<double>{-0.7}, lr, {});
  EXPECT_LT(std::abs(params[0]), 2 * lr);
}

TEST(Adam, MatchesHandRecursion) {
  const AdamConfig cfg{0.8, 0.95, 1e-6};
  std::vector<double> params{1.0};
  AdamState st = AdamState::zeros(1);
  double m = 0, v = 0, x = 1.0;
  const double grads[] = {0.5, -0.2, 1.3, 0.0};
  for (int t = 1; t <= 4; ++t) {
    const double g = grads[t - 1];
    m = cfg.beta1 * m + (1 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1 - cfg.beta2) * g * g;
    const double mh = m / (1 - std::pow(cfg.beta1, t)), vh = v / (1 - std::pow(cfg.beta2, t));
    x -= 0.1 * mh / (std::sqrt(vh) + cfg.epsilon);
    adam_step(st, params, std::vector<double>{g}, 0.1, cfg);
    EXPECT_NEAR(params[0], x, 1e-14);
    EXPECT_GE(st.second_moment[0], 0.0);
  }
}

// ---- gradients -------------------------------------------------------------

TEST(Gradient, ParameterShiftMatchesFiniteDifferences) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const ModelConfig m = model(2, 2, 2);
    const GradientEngine engine(m);
    const auto batch = random_batch(2, 2, 5, rng);
    const CircuitParams p = init_params(m, 100 + trial);
    GradientOptions ps;
    GradientOptions fd;
    fd.method = GradMethod::kFiniteDifference;
    const auto a = engine.compute(p, batch, ps).grad;
    const auto b = engine.compute(p, batch, fd).grad;
    std::vector<double> diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
    EXPECT_LE(max_abs(diff), 1e-6 * max_abs(b)) << "trial " << trial;
  }
}

TEST(Gradient, FiniteDifferencesMatchIndependentLossOracle) {
  std::mt19937_64 rng(2);
  ModelConfig m = model(3, 2, 3);
  m.readout = Readout::kClassical;
  const GradientEngine engine(m);
  const auto batch = random_batch(3, 3, 4, rng);
  CircuitParams p = init_params(m, 7);
  p.classical->weights = {1.3, -0.4, 0.8};
  p.classical->biases = {0.2, 0.0, -0.5};
  const auto flat = p.flatten();
  EXPECT_NEAR(engine.exact_loss(p, batch), oracle_loss(flat, m, batch), 1e-12);
  const auto g = engine.compute(p, batch, {}).grad;
  const double h = 1e-5;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    auto up = flat, dn = flat;
    up[i] += h;
    dn[i] -= h;
    const double fd = (oracle_loss(up, m, batch) - oracle_loss(dn, m, batch)) / (2 * h);
    EXPECT_NEAR(g[i], fd, 1e-8) << "parameter " << i;
  }
}

TEST(Gradient, LiteralShiftsAgreeWithCachedObservables) {
  std::mt19937_64 rng(3);
  ModelConfig m = model(3, 2, 2);
  m.noise.single.depolarizing = true;
  m.noise.single.p_depol = 0.02;
  m.noise.single.thermal = true;
  m.noise.single.gamma = 0.05;
  m.noise.two_qubit = TwoQubitNoise{0.01, 0.1};
  const GradientEngine engine(m);
  const auto batch = random_batch(3, 2, 4, rng);
  const CircuitParams p = init_params(m, 3);
  GradientOptions literal;
  literal.literal_shifts = true;
  const auto a = engine.compute(p, batch, {}).grad;
  const auto b = engine.compute(p, batch, literal).grad;
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);

  // With shots, both paths draw from the same per-sample streams.
  m.shots = 1000;
  const GradientEngine sampled(m);
  GradientOptions s1, s2;
  s1.shot_seed = s2.shot_seed = 9;
  s2.literal_shifts = true;
  const auto c = sampled.compute(p, batch, s1).grad;
  const auto d = sampled.compute(p, batch, s2).grad;
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(c[i], d[i], 1e-12);
}

TEST(Gradient, FlatLandscapeUnderFullDepolarization) {
  std::mt19937_64 rng(4);
  ModelConfig m = model(2, 2, 2);
  m.noise.single.depolarizing = true;
  m.noise.single.p_depol = 0.75;
  const GradientEngine exact(m);
  const auto batch = random_batch(2, 2, 6, rng);
  const CircuitParams p = init_params(m, 5);
  EXPECT_LT(max_abs(exact.compute(p, batch, {}).grad), 1e-12);

  m.shots = 10000;
  const GradientEngine sampled(m);
  // Each shifted estimate has sd 0.01; the gradient stays at the shot-noise level.
  EXPECT_LT(max_abs(sampled.compute(p, batch, {}).grad), 0.05);
}

TEST(Gradient, ClassicalBiasGradientIsProbsMinusOneHot) {
  std::mt19937_64 rng(5);
  ModelConfig m = model(3, 1, 3);
  m.readout = Readout::kClassical;
  const GradientEngine engine(m);
  const auto batch = random_batch(3, 3, 1, rng);
  CircuitParams p = init_params(m, 11);
  p.classical->weights = {0.5, 2.0, -1.0};
  const auto z = engine.expectations(p, batch[0], nullptr);
  const auto probs = predict(z, p, m).probs;
  const auto g = engine.compute(p, batch, {}).grad;
  const std::size_t bias0 = p.thetas.size() + 3;
  for (int k = 0; k < 3; ++k) {
    const double expected = probs[k] - (k == batch[0].source_label ? 1.0 : 0.0);
    EXPECT_NEAR(g[bias0 + k], expected, 1e-12);
  }
  GradientOptions fd;
  fd.method = GradMethod::kFiniteDifference;
  const auto gf = engine.compute(p, batch, fd).grad;
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(g[bias0 + k], gf[bias0 + k], 1e-8);
}

TEST(Gradient, MeanSquareSplitsQuantumAndClassical) {
  std::mt19937_64 rng(6);
  ModelConfig m = model(3, 1, 2);
  m.readout = Readout::kClassical;
  const GradientEngine engine(m);
  const auto batch = random_batch(3, 2, 4, rng);
  const CircuitParams p = init_params(m, 2);
  const auto g = engine.compute(p, batch, {});
  double all = 0.0, cl = 0.0;
  for (std::size_t i = 0; i < g.grad.size(); ++i) {
    all += g.grad[i] * g.grad[i];
    if (i >= p.thetas.size()) cl += g.grad[i] * g.grad[i];
  }
  EXPECT_NEAR(g.mean_sq, all / g.grad.size(), 1e-15);
  ASSERT_TRUE(g.classical_mean_sq.has_value());
  EXPECT_NEAR(*g.classical_mean_sq, cl / 4, 1e-15);
}

TEST(Gradient, SampledGradientIsScheduleIndependent) {
  std::mt19937_64 rng(7);
  ModelConfig m = model(3, 2, 2);
  m.shots = 500;
  const GradientEngine engine(m);
  const auto batch = random_batch(3, 2, 6, rng);
  const CircuitParams p = init_params(m, 4);
  GradientOptions o;
  o.shot_seed = 77;
  o.sample_offset = 100;
  const auto a = engine.compute(p, batch, o);
  const auto b = engine.compute(p, batch, o);
  EXPECT_EQ(a.grad, b.grad);
  o.shot_seed = 78;
  EXPECT_NE(engine.compute(p, batch, o).grad, a.grad);
}

TEST(Gradient, MeanSquareShrinksWithDepolarizingStrength) {
  // Fixed random parameters and batches; only the noise strength changes.
  std::mt19937_64 rng(8);
  const int n = 4;
  std::vector<std::vector<EncodedState>> batches_;
  for (int b = 0; b < 5; ++b) batches_.push_back(random_batch(n, 4, 10, rng));
  std::vector<double> avg;
  for (double p : {0.0, 2e-3, 2e-2, 2e-1}) {
    ModelConfig m = model(n, 6, 4);
    m.noise.single.depolarizing = p > 0;
    m.noise.single.p_depol = p;
    const GradientEngine engine(m);
    const CircuitParams params = init_params(m, 21);
    double sum = 0.0;
    for (const auto& b : batches_) sum += engine.compute(params, b, {}).mean_sq;
    avg.push_back(sum / batches_.size());
  }
  for (std::size_t i = 1; i < avg.size(); ++i) EXPECT_LE(avg[i], avg[i - 1]) << i;
  EXPECT_GE(avg.front(), 10 * avg.back());
}

// ---- phase-mean compensation ----------------------------------------------

class Compensation : public ::testing::TestWithParam<Placement> {};

TEST_P(Compensation, CompensatedRunFollowsZeroMeanLosses) {
  const Placement placement = GetParam();
  const Dataset all = synthetic_dataset(3, 2, 8, 40);
  const auto [train_set, test_set] = split_dataset(all, 10, 4);
  ModelConfig base = model(3, 2, 2);
  base.noise.single.phase_damping = true;
  base.noise.single.sigma = 0.08;
  base.noise.single.phase_placement = placement;
  TrainConfig tc;
  tc.max_images = 120;
  tc.batch_size = 10;
  tc.eval_every = 60;
  tc.learning_rate = 0.05;

  ModelConfig shifted = base;
  shifted.noise.single.mu = kPi / 2;
  const CircuitParams init = init_params(base, tc.seed_params);
  CircuitParams comp = init;
  compensate_phase_mean(comp, kPi / 2, placement);

  const auto a = train(base, tc, train_set, test_set, init);
  const auto b = train(shifted, tc, train_set, test_set, comp);
  ASSERT_EQ(a.batch_loss.size(), b.batch_loss.size());
  for (std::size_t i = 0; i < a.batch_loss.size(); ++i)
    EXPECT_NEAR(a.batch_loss[i], b.batch_loss[i], 1e-9) << "batch " << i;

  // Without compensation the trajectories differ.
  const auto c = train(shifted, tc, train_set, test_set, init);
  EXPECT_GT(std::abs(c.batch_loss.front() - a.batch_loss.front()), 1e-6);
}

INSTANTIATE_TEST_SUITE_P(Placements, Compensation,
                         ::testing::Values(Placement::kPerFactor, Placement::kPerGate));

// ---- training loop ---------------------------------------------------------

struct SmallTask {
  Dataset train_set, test_set;
  ModelConfig m = model(3, 2, 2);
  TrainConfig tc;
  SmallTask() {
    auto split = split_dataset(synthetic_dataset(8, 2, 8, 40), 20, 9);
    train_set = std::move(split.first);
    test_set = std::move(split.second);
    tc.max_images = 100;
    tc.batch_size = 10;
    tc.eval_every = 30;
    tc.learning_rate = 0.05;
  }
};

TEST(Train, RecordCadence) {
  SmallTask t;
  std::vector<std::size_t> seen;
  const auto r = train(t.m, t.tc, t.train_set, t.test_set, std::nullopt,
                       [&](const TrainRecord& rec) { seen.push_back(rec.images_seen); });
  EXPECT_EQ(seen, (std::vector<std::size_t>{30, 60, 90, 100}));
  EXPECT_EQ(r.records.size(), 4u);
  EXPECT_EQ(r.batch_loss.size(), 10u);
  for (const auto& rec : r.records) {
    EXPECT_GE(rec.test_success_rate, 0.0);
    EXPECT_LE(rec.test_success_rate, 1.0);
    EXPECT_GE(rec.mean_sq_gradient, 0.0);
  }
}

TEST(Train, ZeroLearningRateFreezesParameters) {
  SmallTask t;
  t.tc.learning_rate = 0.0;
  const CircuitParams init = init_params(t.m, t.tc.seed_params);
  const auto r = train(t.m, t.tc, t.train_set, t.test_set, init);
  EXPECT_EQ(r.final_params.thetas, init.thetas);
  for (const auto& rec : r.records)
    EXPECT_EQ(rec.test_success_rate, r.records.front().test_success_rate);
}

TEST(Train, SameSeedsSameRecords) {
  SmallTask t;
  t.m.shots = 200;
  const auto a = train(t.m, t.tc, t.train_set, t.test_set);
  const auto b = train(t.m, t.tc, t.train_set, t.test_set);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].loss, b.records[i].loss);
    EXPECT_EQ(a.records[i].mean_sq_gradient, b.records[i].mean_sq_gradient);
    EXPECT_EQ(a.records[i].test_success_rate, b.records[i].test_success_rate);
  }
  EXPECT_EQ(a.final_params.thetas, b.final_params.thetas);
}

TEST(Train, LossDecreasesOnEasyTask) {
  SmallTask t;
  t.tc.max_images = 300;
  const auto r = train(t.m, t.tc, t.train_set, t.test_set);
  const double first = std::accumulate(r.batch_loss.begin(), r.batch_loss.begin() + 5, 0.0);
  const double last = std::accumulate(r.batch_loss.end() - 5, r.batch_loss.end(), 0.0);
  EXPECT_LT(last, first);
}

TEST(Train, ConfigurationErrorsSurfaceBeforeTraining) {
  SmallTask t;
  ModelConfig wrong = model(4, 2, 2);
  EXPECT_THROW(train(wrong, t.tc, t.train_set, t.test_set), std::invalid_argument);
  TrainConfig bad = t.tc;
  bad.adam.beta1 = 1.0;
  EXPECT_THROW(train(t.m, bad, t.train_set, t.test_set), std::invalid_argument);
  bad = t.tc;
  bad.learning_rate = -1.0;
  EXPECT_THROW(train(t.m, bad, t.train_set, t.test_set), std::invalid_argument);
  ModelConfig few = model(3, 2, 2);
  Dataset four = t.train_set;
  four.num_classes = 4;
  four.samples[0].label = 3;
  EXPECT_THROW(train(few, t.tc, four, t.test_set), DataError);
}

TEST(Train, InitialisationIsSeededUniform) {
  ModelConfig m = model(4, 5, 4);
  m.readout = Readout::kClassical;
  const auto a = init_params(m, 3), b = init_params(m, 3), c = init_params(m, 4);
  EXPECT_EQ(a.thetas, b.thetas);
  EXPECT_NE(a.thetas, c.thetas);
  for (double t : a.thetas) {
    EXPECT_GT(t, -kPi);
    EXPECT_LT(t, kPi);
  }
  EXPECT_EQ(a.classical->weights, std::vector<double>(4, 1.0));
  EXPECT_EQ(a.classical->biases, std::vector<double>(4, 0.0));
}

TEST(Train, NoiseFreeDeskScaleRegression) {
  // Four-class synthetic task on 6 qubits and 8 layers, exact expectations.
  const auto [train_set, test_set] = split_dataset(synthetic_dataset(7, 4, 64, 600), 200, 8);
  ModelConfig m = model(6, 8, 4);
  TrainConfig tc;
  tc.max_images = 2000;
  tc.eval_every = 1000;
  const auto r = train(m, tc, train_set, test_set);
  EXPECT_GE(r.records.back().test_success_rate, 0.9);
  // Pinned baseline: every one of the 200 held-out images is classified correctly.
  EXPECT_EQ(r.records.back().test_success_rate, 1.0);
}

}  // namespace
}  // namespace pqvc
