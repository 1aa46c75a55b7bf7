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
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pqvc/data.hpp"
#include "pqvc/estimator.hpp"
#include "pqvc/training.hpp"
#include "pqvc/vqc.hpp"

namespace pqvc {

// Text format, one entry per line:
//
//   # comment
//   model.n_qubits = 6
//   noise.p_depol = [0, 2e-3, 2e-2]   # a list expands into a sweep
//
// Later lines override earlier ones. Command-line overrides are applied
// after the file. Every key must be known; unknown keys are ConfigErrors.

/// Key -> raw value. A value in brackets is a sweep list.
using RawConfig = std::map<std::string, std::string>;

RawConfig parse_config_text(const std::string& text);
RawConfig read_config_file(const std::filesystem::path& path);

/// "key=value" override; the key must be known.
void apply_override(RawConfig& raw, const std::string& assignment);

struct SweepPoint {
  std::string label;  // e.g. "noise.p_depol=0.002"; empty without sweeps
  RawConfig values;   // scalar values only
};

/// Cartesian product over every list-valued key, in key order.
std::vector<SweepPoint> expand_sweeps(const RawConfig& raw);

struct DatasetConfig {
  enum class Kind { kSynthetic, kIdx };
  Kind kind = Kind::kSynthetic;
  std::filesystem::path images;
  std::filesystem::path labels;
  std::filesystem::path test_images;
  std::filesystem::path test_labels;
  /// 0 derives the size from the model: 2^n pixels, or 2^(n+1) compressed.
  std::size_t target_pixels = 0;
  Encoding encoding = Encoding::kAmplitude;
  std::uint64_t seed = 7;
  int num_classes = 4;
  std::size_t samples_per_class = 600;
  double noise_amplitude = 0.1;
  std::size_t test_count = 200;
  /// Keep only labels below this value (0 keeps all). Useful to train a
  /// four-class subset of a ten-class file.
  int max_label = 0;
};

struct EstimatorConfig {
  double epsilon = 1e-3;
  std::int64_t q_alg = 10;
  double p_phys = 1e-3;
  double p_star = qec::kThreshold;
  double coeff = qec::kLogicalCoefficient;
  double logical_cycles = 4060;
  double eps_t = 1e-4;
  double eps_synth = 1e-4;
  double t_scaling = 1.5;
  double shots = 10000;
  double bernoulli_p = 0.5;
  int max_layers = 3;
  qec::DistillationProtocol protocol = qec::fifteen_to_one(1e-4);
  qec::SpatialForm spatial_form = qec::SpatialForm::kTable;
};

struct ChannelCheckConfig {
  std::size_t draws = 100;
  std::size_t mc_samples = 1000000;
  std::uint64_t seed = 11;
  /// Negative control: perturbs the closed-form dephasing factor.
  bool inject_wrong_dephasing = false;
};

struct ExperimentConfig {
  ModelConfig model;
  TrainConfig train;
  DatasetConfig dataset;
  EstimatorConfig estimator;
  ChannelCheckConfig channel_check;
  std::filesystem::path output_dir = "runs/default";
  /// Write measured wall-clock seconds into the CSV. Off by default so that
  /// reruns are byte-identical; timings always go to the manifest.
  bool record_wall_time = false;
  /// Strengths used when noise.two_qubit is switched on.
  TwoQubitNoise two_qubit_strengths{kTwoQubitDepolCalibrated, kCrosstalkAlphaCalibrated};
  /// Pre-compensate initial angles for the phase-damping mean.
  bool compensate_phase_mean = false;
};

/// Typed view of a sweep-free config. Throws ConfigError.
ExperimentConfig to_experiment(const RawConfig& raw);

/// Every key with its resolved value, sorted, in the input format. Unset
/// paths are omitted.
std::string resolved_text(const ExperimentConfig& cfg);

/// Keys accepted by the parser.
const std::vector<std::string>& known_keys();

}  // namespace pqvc
