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
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pqvc/data.hpp"
#include "pqvc/vqc.hpp"

namespace pqvc {

enum class GradMethod { kParameterShift, kFiniteDifference };

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainConfig {
  double learning_rate = 0.005;
  std::size_t batch_size = 50;
  AdamConfig adam;
  std::size_t max_images = 2000;
  std::size_t eval_every = 200;
  GradMethod grad_method = GradMethod::kParameterShift;
  Encoding encoding = Encoding::kAmplitude;
  std::uint64_t seed_params = 1;
  std::uint64_t seed_shots = 2;
  std::uint64_t seed_batches = 3;

  /// Throws std::invalid_argument on out-of-range settings.
  void validate() const;
};

struct TrainRecord {
  std::size_t images_seen = 0;
  double loss = 0.0;
  double mean_sq_gradient = 0.0;
  std::optional<double> classical_mean_sq_gradient;
  double test_success_rate = 0.0;
  double wall_seconds = 0.0;
};

struct AdamState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::size_t step = 0;

  static AdamState zeros(std::size_t n);
};

/// Counts how often cross_entropy had to floor a vanishing probability.
struct LossDiagnostics {
  std::size_t floored = 0;
};

inline constexpr double kProbabilityFloor = 1e-12;

/// -log(probs[label]) with the probability floored at kProbabilityFloor.
double cross_entropy(std::span<const double> probs, int label,
                     LossDiagnostics* diagnostics = nullptr);

/// One bias-corrected ADAM update of `params` in place.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grad,
               double learning_rate, const AdamConfig& adam);

/// Angles uniform on (-pi, pi); classical layer w = 1, c = 0 when enabled.
CircuitParams init_params(const ModelConfig& cfg, std::uint64_t seed);

/// Shifts Euler angles so a run with mean over-rotation `mu` follows the same
/// loss trajectory as the zero-mean run. Per-factor placement needs
/// alpha -= 2 mu and gamma -= mu; per-gate placement needs alpha -= mu.
void compensate_phase_mean(CircuitParams& params, double mu, Placement placement);

struct BatchGradient {
  std::vector<double> grad;  // same layout as CircuitParams::flatten()
  double loss = 0.0;         // batch mean
  double mean_sq = 0.0;
  std::optional<double> classical_mean_sq;
};

struct GradientOptions {
  GradMethod method = GradMethod::kParameterShift;
  std::uint64_t shot_seed = 0;
  /// Global index of the first sample; keys the per-sample rng streams.
  std::uint64_t sample_offset = 0;
  /// Force one full shifted circuit per parameter and sign.
  bool literal_shifts = false;
  double fd_step = 1e-4;
};

/// Gradients of the batch-mean cross-entropy.
///
/// Parameter-shift mode applies the chain rule through the softmax, with
/// each dz_j/dtheta taken from two circuits at theta +- pi/2 whose
/// expectations are shot-sampled independently. Shifted expectations come
/// from Heisenberg-picture observables cached once per batch unless the cache
/// would be too large or `literal_shifts` is set. Finite-difference mode uses
/// central differences of the exact (shot-free) loss.
class GradientEngine {
 public:
  explicit GradientEngine(const ModelConfig& cfg);

  const ModelConfig& config() const { return cfg_; }
  const CircuitProgram& program() const { return program_; }

  BatchGradient compute(const CircuitParams& params, std::span<const EncodedState> batch,
                        const GradientOptions& options, LossDiagnostics* diagnostics = nullptr) const;

  /// Exact batch-mean loss at the given parameters.
  double exact_loss(const CircuitParams& params, std::span<const EncodedState> batch) const;

  /// <Z_j> for j < num_classes, shot-sampled when shots > 0.
  std::vector<double> expectations(const CircuitParams& params, const EncodedState& sample,
                                   std::mt19937_64* rng) const;

 private:
  BatchGradient parameter_shift(const CircuitParams& params,
                                std::span<const EncodedState> batch,
                                const GradientOptions& options,
                                LossDiagnostics* diagnostics) const;
  BatchGradient finite_difference(const CircuitParams& params,
                                  std::span<const EncodedState> batch,
                                  const GradientOptions& options) const;

  ModelConfig cfg_;
  CircuitProgram program_;
};

/// Fraction of samples whose predicted label matches.
double success_rate(const GradientEngine& engine, const CircuitParams& params,
                    std::span<const EncodedState> samples, std::uint64_t shot_seed);

struct TrainResult {
  std::vector<TrainRecord> records;
  /// mean_sq_gradient of every batch, in order.
  std::vector<double> batch_mean_sq;
  std::vector<double> batch_loss;
  CircuitParams final_params;
  LossDiagnostics diagnostics;
};

using RecordCallback = std::function<void(const TrainRecord&)>;

/// Full loop: seeded batches, ADAM updates, a TrainRecord after every
/// `eval_every` images and at the end. Training repeats epochs until
/// `max_images` samples have been used.
TrainResult train(const ModelConfig& model, const TrainConfig& train_cfg, const Dataset& train_set,
                  const Dataset& test_set, std::optional<CircuitParams> initial = std::nullopt,
                  const RecordCallback& on_record = {});

std::vector<EncodedState> encode_all(const Dataset& d, Encoding encoding);

}  // namespace pqvc
