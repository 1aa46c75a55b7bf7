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

#include "pqvc/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "pqvc/errors.hpp"

namespace pqvc {
namespace {

constexpr double kShift = std::numbers::pi / 2.0;
// Above this many bytes of cached observables the literal shifted circuits
// are used instead.
constexpr std::size_t kCacheLimitBytes = std::size_t{512} << 20;
constexpr std::uint64_t kEvalSeedSalt = 0x5be0cd19137e2179ULL;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

ComplexMatrix pure_density(const PureState& s) {
  const auto& a = s.amplitudes();
  return a * a.adjoint();
}

double mean_square(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x * x;
  return s / static_cast<double>(v.size());
}

// Loss and dL/dz_k for one sample given estimated readout expectations.
struct SampleLoss {
  double loss = 0.0;
  std::vector<double> dlogit;  // probs - onehot
  std::vector<double> dz;      // dL/dz_k
};

SampleLoss sample_loss(std::span<const double> z, int label, const CircuitParams& params,
                       const ModelConfig& cfg, LossDiagnostics* diagnostics) {
  SampleLoss out;
  const auto probs = softmax(readout_logits(z, params, cfg));
  out.loss = cross_entropy(probs, label, diagnostics);
  out.dlogit = probs;
  out.dlogit[label] -= 1.0;
  out.dz = out.dlogit;
  if (cfg.readout == Readout::kClassical) {
    for (std::size_t k = 0; k < out.dz.size(); ++k) out.dz[k] *= params.classical->weights[k];
  }
  return out;
}

std::vector<double> readout_z(const ComplexMatrix& rho, const ModelConfig& cfg) {
  auto z = z_expectations(rho, cfg.n_qubits);
  z.resize(cfg.num_classes);
  return z;
}

}  // namespace

void TrainConfig::validate() const {
  require(learning_rate >= 0.0 && std::isfinite(learning_rate), "train.learning_rate must be >= 0");
  require(batch_size >= 1, "train.batch_size must be positive");
  require(adam.beta1 > 0.0 && adam.beta1 < 1.0, "train.beta1 must lie in (0, 1)");
  require(adam.beta2 > 0.0 && adam.beta2 < 1.0, "train.beta2 must lie in (0, 1)");
  require(adam.epsilon > 0.0, "train.epsilon must be positive");
  require(eval_every >= 1, "train.eval_every must be positive");
}

AdamState AdamState::zeros(std::size_t n) {
  return AdamState{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), 0};
}

double cross_entropy(std::span<const double> probs, int label, LossDiagnostics* diagnostics) {
  require(label >= 0 && static_cast<std::size_t>(label) < probs.size(),
          "label outside the probability vector");
  double p = probs[label];
  if (p < kProbabilityFloor) {
    p = kProbabilityFloor;
    if (diagnostics) ++diagnostics->floored;
  }
  return -std::log(p);
}

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grad,
               double learning_rate, const AdamConfig& adam) {
  require(params.size() == grad.size() && state.first_moment.size() == params.size() &&
              state.second_moment.size() == params.size(),
          "adam_step: shape mismatch");
  ++state.step;
  const double c1 = 1.0 - std::pow(adam.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(adam.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = adam.beta1 * m + (1.0 - adam.beta1) * grad[i];
    v = adam.beta2 * v + (1.0 - adam.beta2) * grad[i] * grad[i];
    params[i] -= learning_rate * (m / c1) / (std::sqrt(v / c2) + adam.epsilon);
  }
}

CircuitParams init_params(const ModelConfig& cfg, std::uint64_t seed) {
  CircuitParams p = CircuitParams::zeros(cfg.n_layers, cfg.n_qubits);
  std::mt19937_64 rng = derived_rng(seed, 0, 0);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  for (double& t : p.thetas) t = angle(rng);
  if (cfg.readout == Readout::kClassical) {
    p.classical = ClassicalLayer{std::vector<double>(cfg.num_classes, 1.0),
                                 std::vector<double>(cfg.num_classes, 0.0)};
  }
  return p;
}

void compensate_phase_mean(CircuitParams& params, double mu, Placement placement) {
  for (int l = 0; l < params.layers; ++l) {
    for (int q = 0; q < params.qubits; ++q) {
      if (placement == Placement::kPerFactor) {
        params.angle(l, q, 0) -= 2.0 * mu;
        params.angle(l, q, 2) -= mu;
      } else {
        params.angle(l, q, 0) -= mu;
      }
    }
  }
}

GradientEngine::GradientEngine(const ModelConfig& cfg) : cfg_(cfg), program_(cfg) {}

std::vector<double> GradientEngine::expectations(const CircuitParams& params,
                                                 const EncodedState& sample,
                                                 std::mt19937_64* rng) const {
  ComplexMatrix rho = pure_density(sample.state);
  program_.run(rho, params.thetas);
  if (cfg_.shots == 0 || rng == nullptr) return readout_z(rho, cfg_);
  if (cfg_.joint_sampling) {
    auto z = sample_expectations_joint(rho, cfg_.n_qubits, cfg_.shots, *rng);
    z.resize(cfg_.num_classes);
    return z;
  }
  return sample_expectations(readout_z(rho, cfg_), cfg_.shots, *rng);
}

double GradientEngine::exact_loss(const CircuitParams& params,
                                  std::span<const EncodedState> batch) const {
  double total = 0.0;
  for (const auto& s : batch) {
    const auto z = expectations(params, s, nullptr);
    total += cross_entropy(softmax(readout_logits(z, params, cfg_)), s.source_label);
  }
  return total / static_cast<double>(batch.size());
}

BatchGradient GradientEngine::compute(const CircuitParams& params,
                                      std::span<const EncodedState> batch,
                                      const GradientOptions& options,
                                      LossDiagnostics* diagnostics) const {
  require(!batch.empty(), "gradient of an empty batch");
  require(params.thetas.size() == program_.num_params(), "parameter shape does not match model");
  require((cfg_.readout == Readout::kClassical) == params.classical.has_value(),
          "classical parameters do not match the readout mode");
  for (const auto& s : batch) {
    require(s.state.num_qubits() == cfg_.n_qubits, "encoded state size does not match model");
    require(s.source_label >= 0 && s.source_label < cfg_.num_classes, "label out of range");
  }
  BatchGradient g = options.method == GradMethod::kFiniteDifference
                        ? finite_difference(params, batch, options)
                        : parameter_shift(params, batch, options, diagnostics);
  g.mean_sq = mean_square(g.grad);
  if (params.classical) {
    const std::size_t nq = params.thetas.size();
    g.classical_mean_sq =
        mean_square(std::span<const double>(g.grad).subspan(nq, g.grad.size() - nq));
  }
  return g;
}

BatchGradient GradientEngine::parameter_shift(const CircuitParams& params,
                                              std::span<const EncodedState> batch,
                                              const GradientOptions& options,
                                              LossDiagnostics* diagnostics) const {
  const std::size_t num_params = program_.num_params();
  const std::size_t k = static_cast<std::size_t>(cfg_.num_classes);
  const std::size_t dim = std::size_t{1} << cfg_.n_qubits;
  const std::size_t cache_bytes = num_params * k * dim * dim * sizeof(Complex);
  const bool literal =
      options.literal_shifts || cfg_.joint_sampling || cache_bytes > kCacheLimitBytes;
  const auto& ops = program_.ops();
  const std::span<const double> thetas(params.thetas);

  // cache[p * k + j] is the Heisenberg-picture Z_j seen just after the
  // rotation driven by angle p.
  std::vector<ComplexMatrix> cache;
  if (!literal) {
    cache.resize(num_params * k);
    std::vector<ComplexMatrix> obs;
    for (std::size_t j = 0; j < k; ++j) obs.push_back(z_observable(static_cast<int>(j), cfg_.n_qubits));
    for (std::size_t i = ops.size(); i-- > 0;) {
      const auto& op = ops[i];
      const bool rotation = op.kind == CircuitProgram::Kind::kRotY ||
                            op.kind == CircuitProgram::Kind::kRotZ;
      for (std::size_t j = 0; j < k; ++j) {
        if (rotation) cache[op.param * k + j] = obs[j];
        program_.apply_op_adjoint(obs[j], i, thetas);
      }
    }
  }

  const std::size_t total = params.size();
  std::vector<std::vector<double>> per_sample(batch.size(), std::vector<double>(total, 0.0));
  std::vector<double> losses(batch.size(), 0.0);
  std::vector<LossDiagnostics> diags(batch.size());

#pragma omp parallel for schedule(dynamic)
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const EncodedState& sample = batch[b];
    const std::uint64_t sample_id = options.sample_offset + b;
    // z_shift[p][sign * k + j]: exact shifted expectations.
    std::vector<std::vector<double>> z_shift(num_params, std::vector<double>(2 * k, 0.0));
    std::vector<double> z_exact;
    ComplexMatrix rho0 = pure_density(sample.state);

    if (literal) {
      ComplexMatrix rho = rho0;
      program_.run(rho, thetas);
      z_exact = readout_z(rho, cfg_);
      for (std::size_t p = 0; p < num_params; ++p) {
        for (int sign = 0; sign < 2; ++sign) {
          ComplexMatrix shifted = rho0;
          program_.run(shifted, thetas, p, sign == 0 ? kShift : -kShift);
          if (cfg_.joint_sampling && cfg_.shots > 0) {
            auto rng = derived_rng(options.shot_seed, sample_id, 1 + 2 * p + sign);
            auto z = sample_expectations_joint(shifted, cfg_.n_qubits, cfg_.shots, rng);
            std::copy_n(z.begin(), k, z_shift[p].begin() + sign * k);
          } else {
            const auto z = readout_z(shifted, cfg_);
            std::copy(z.begin(), z.end(), z_shift[p].begin() + sign * k);
          }
        }
      }
    } else {
      ComplexMatrix rho = rho0;
      ComplexMatrix shifted;
      for (std::size_t i = 0; i < ops.size(); ++i) {
        program_.apply_op(rho, i, thetas);
        const auto& op = ops[i];
        if (op.kind != CircuitProgram::Kind::kRotY && op.kind != CircuitProgram::Kind::kRotZ) {
          continue;
        }
        // Same-axis rotations compose, so R(theta +- s) = R(+-s) R(theta).
        for (int sign = 0; sign < 2; ++sign) {
          const double s = sign == 0 ? kShift : -kShift;
          shifted = rho;
          if (op.kind == CircuitProgram::Kind::kRotZ) {
            apply_phase_covariant(shifted, dephasing_map(std::polar(1.0, -s)), op.target,
                                  cfg_.n_qubits);
          } else {
            Eigen::Matrix2cd u;
            u << std::cos(0.5 * s), -std::sin(0.5 * s), std::sin(0.5 * s), std::cos(0.5 * s);
            local::conjugate_single(shifted, u, op.target, cfg_.n_qubits);
          }
          for (std::size_t j = 0; j < k; ++j) {
            z_shift[op.param][sign * k + j] =
                std::clamp(hermitian_inner(cache[op.param * k + j], shifted), -1.0, 1.0);
          }
        }
      }
      z_exact = readout_z(rho, cfg_);
    }

    std::vector<double> z_hat = z_exact;
    if (cfg_.shots > 0) {
      auto rng = derived_rng(options.shot_seed, sample_id, 0);
      if (cfg_.joint_sampling) {
        ComplexMatrix rho = rho0;
        program_.run(rho, thetas);
        z_hat = sample_expectations_joint(rho, cfg_.n_qubits, cfg_.shots, rng);
        z_hat.resize(k);
      } else {
        z_hat = sample_expectations(z_exact, cfg_.shots, rng);
      }
      if (!cfg_.joint_sampling) {
        for (std::size_t p = 0; p < num_params; ++p) {
          for (int sign = 0; sign < 2; ++sign) {
            auto srng = derived_rng(options.shot_seed, sample_id, 1 + 2 * p + sign);
            const auto est = sample_expectations(
                std::span<const double>(z_shift[p]).subspan(sign * k, k), cfg_.shots, srng);
            std::copy(est.begin(), est.end(), z_shift[p].begin() + sign * k);
          }
        }
      }
    }

    const SampleLoss sl = sample_loss(z_hat, sample.source_label, params, cfg_, &diags[b]);
    losses[b] = sl.loss;
    auto& g = per_sample[b];
    for (std::size_t p = 0; p < num_params; ++p) {
      double acc = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        acc += sl.dz[j] * 0.5 * (z_shift[p][j] - z_shift[p][k + j]);
      }
      g[p] = acc;
    }
    if (params.classical) {
      for (std::size_t j = 0; j < k; ++j) {
        g[num_params + j] = sl.dlogit[j] * std::clamp(z_hat[j], -1.0, 1.0);
        g[num_params + k + j] = sl.dlogit[j];
      }
    }
  }

  // Ordered reduction keeps results independent of thread scheduling.
  BatchGradient out;
  out.grad.assign(total, 0.0);
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    for (std::size_t i = 0; i < total; ++i) out.grad[i] += per_sample[b][i] * inv;
    out.loss += losses[b] * inv;
    if (diagnostics) diagnostics->floored += diags[b].floored;
  }
  return out;
}

BatchGradient GradientEngine::finite_difference(const CircuitParams& params,
                                                std::span<const EncodedState> batch,
                                                const GradientOptions& options) const {
  const double h = options.fd_step;
  std::vector<double> flat = params.flatten();
  BatchGradient out;
  out.grad.assign(flat.size(), 0.0);
  out.loss = exact_loss(params, batch);
  CircuitParams probe = params;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    const double saved = flat[i];
    flat[i] = saved + h;
    probe.assign(flat);
    const double up = exact_loss(probe, batch);
    flat[i] = saved - h;
    probe.assign(flat);
    const double down = exact_loss(probe, batch);
    flat[i] = saved;
    out.grad[i] = (up - down) / (2.0 * h);
  }
  return out;
}

double success_rate(const GradientEngine& engine, const CircuitParams& params,
                    std::span<const EncodedState> samples, std::uint64_t shot_seed) {
  if (samples.empty()) return 0.0;
  const ModelConfig& cfg = engine.config();
  const std::size_t k = static_cast<std::size_t>(cfg.num_classes);
  const bool heisenberg = !cfg.joint_sampling;

  // One Heisenberg pass per readout qubit makes every test sample O(4^n).
  std::vector<ComplexMatrix> obs;
  if (heisenberg) {
    for (std::size_t j = 0; j < k; ++j) {
      obs.push_back(z_observable(static_cast<int>(j), cfg.n_qubits));
      engine.program().run_adjoint(obs.back(), params.thetas);
    }
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::mt19937_64 rng = derived_rng(shot_seed ^ kEvalSeedSalt, i, 0);
    std::vector<double> z;
    if (heisenberg) {
      const auto& a = samples[i].state.amplitudes();
      z.resize(k);
      for (std::size_t j = 0; j < k; ++j) {
        z[j] = std::clamp(a.dot(obs[j] * a).real(), -1.0, 1.0);
      }
      if (cfg.shots > 0) z = sample_expectations(z, cfg.shots, rng);
    } else {
      z = engine.expectations(params, samples[i], cfg.shots > 0 ? &rng : nullptr);
    }
    if (predict(z, params, cfg).label == samples[i].source_label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(samples.size());
}

std::vector<EncodedState> encode_all(const Dataset& d, Encoding encoding) {
  std::vector<EncodedState> out;
  out.reserve(d.size());
  for (const auto& s : d.samples) out.push_back(encode(s, encoding));
  return out;
}

TrainResult train(const ModelConfig& model, const TrainConfig& train_cfg, const Dataset& train_set,
                  const Dataset& test_set, std::optional<CircuitParams> initial,
                  const RecordCallback& on_record) {
  model.validate();
  train_cfg.validate();
  if (train_set.size() == 0) throw DataError("training set is empty");
  for (const Dataset* d : {&train_set, &test_set}) {
    d->validate();
    if (d->size() == 0) continue;
    const int nq = qubits_for_pixels(d->pixel_count(), train_cfg.encoding);
    if (nq != model.n_qubits) {
      throw std::invalid_argument("images of " + std::to_string(d->pixel_count()) +
                                  " pixels need " + std::to_string(nq) + " qubits, model has " +
                                  std::to_string(model.n_qubits));
    }
    for (const auto& s : d->samples) {
      if (s.label >= model.num_classes) {
        throw DataError("label " + std::to_string(s.label) + " exceeds the " +
                        std::to_string(model.num_classes) + " readout classes");
      }
    }
  }

  const auto train_states = encode_all(train_set, train_cfg.encoding);
  const auto test_states = encode_all(test_set, train_cfg.encoding);
  const GradientEngine engine(model);

  TrainResult result;
  result.final_params = initial ? *initial : init_params(model, train_cfg.seed_params);
  require(result.final_params.thetas.size() == engine.program().num_params(),
          "initial parameters do not match the model");
  CircuitParams& params = result.final_params;
  std::vector<double> flat = params.flatten();
  AdamState adam = AdamState::zeros(flat.size());

  const auto start = std::chrono::steady_clock::now();
  std::size_t seen = 0;
  std::size_t next_eval = train_cfg.eval_every;
  std::uint64_t epoch = 0;
  std::vector<EncodedState> batch;
  while (seen < train_cfg.max_images) {
    const auto order = batches(train_set, train_cfg.batch_size, train_cfg.seed_batches + epoch);
    ++epoch;
    for (const auto& indices : order) {
      if (seen >= train_cfg.max_images) break;
      const std::size_t take = std::min(indices.size(), train_cfg.max_images - seen);
      batch.clear();
      for (std::size_t i = 0; i < take; ++i) batch.push_back(train_states[indices[i]]);

      GradientOptions opts;
      opts.method = train_cfg.grad_method;
      opts.shot_seed = train_cfg.seed_shots;
      opts.sample_offset = seen;
      const BatchGradient g = engine.compute(params, batch, opts, &result.diagnostics);
      if (!std::isfinite(g.loss) || !std::isfinite(g.mean_sq)) {
        throw NumericError("non-finite loss or gradient after " + std::to_string(seen) +
                           " images");
      }
      adam_step(adam, flat, g.grad, train_cfg.learning_rate, train_cfg.adam);
      params.assign(flat);
      seen += take;
      result.batch_mean_sq.push_back(g.mean_sq);
      result.batch_loss.push_back(g.loss);

      if (seen >= next_eval || seen >= train_cfg.max_images) {
        while (next_eval <= seen) next_eval += train_cfg.eval_every;
        TrainRecord rec;
        rec.images_seen = seen;
        rec.loss = g.loss;
        rec.mean_sq_gradient = g.mean_sq;
        rec.classical_mean_sq_gradient = g.classical_mean_sq;
        rec.test_success_rate = success_rate(engine, params, test_states, train_cfg.seed_shots);
        rec.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.records.push_back(rec);
        if (on_record) on_record(rec);
      }
    }
  }
  return result;
}

}  // namespace pqvc
