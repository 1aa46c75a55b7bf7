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

#include "pqvc/vqc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pqvc {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

Eigen::Matrix2cd ry_matrix(double theta) {
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  Eigen::Matrix2cd u;
  u << c, -s, s, c;
  return u;
}

// X -> CZ X CZ for CZ on (a, b). CZ is real diagonal with entries +-1.
void apply_cz(ComplexMatrix& m, int a, int b, int n) {
  const std::size_t dim = static_cast<std::size_t>(m.rows());
  const std::size_t mask = (std::size_t{1} << (n - 1 - a)) | (std::size_t{1} << (n - 1 - b));
  for (std::size_t c = 0; c < dim; ++c) {
    const bool cflip = (c & mask) == mask;
    Complex* col = m.data() + c * dim;
    for (std::size_t r = 0; r < dim; ++r) {
      if (((r & mask) == mask) != cflip) col[r] = -col[r];
    }
  }
}

}  // namespace

CircuitParams CircuitParams::zeros(int layers, int qubits) {
  CircuitParams p;
  p.layers = layers;
  p.qubits = qubits;
  p.thetas.assign(static_cast<std::size_t>(layers) * qubits * 3, 0.0);
  return p;
}

EulerAngles CircuitParams::euler(int layer, int qubit) const {
  return EulerAngles{angle(layer, qubit, 0), angle(layer, qubit, 1), angle(layer, qubit, 2)};
}

std::vector<double> CircuitParams::flatten() const {
  std::vector<double> out = thetas;
  if (classical) {
    out.insert(out.end(), classical->weights.begin(), classical->weights.end());
    out.insert(out.end(), classical->biases.begin(), classical->biases.end());
  }
  return out;
}

void CircuitParams::assign(std::span<const double> flat) {
  require(flat.size() == size(), "parameter vector has the wrong length");
  std::copy_n(flat.begin(), thetas.size(), thetas.begin());
  if (classical) {
    auto it = flat.begin() + static_cast<std::ptrdiff_t>(thetas.size());
    std::copy_n(it, classical->weights.size(), classical->weights.begin());
    it += static_cast<std::ptrdiff_t>(classical->weights.size());
    std::copy_n(it, classical->biases.size(), classical->biases.begin());
  }
}

std::size_t CircuitParams::size() const {
  std::size_t s = thetas.size();
  if (classical) s += classical->weights.size() + classical->biases.size();
  return s;
}

void ModelConfig::validate() const {
  require(n_qubits >= 1, "model.n_qubits must be positive");
  require(n_layers >= 0, "model.n_layers must be non-negative");
  require(num_classes >= 2, "number of classes must be at least 2");
  require(num_classes <= n_qubits,
          "readout needs one qubit per class: " + std::to_string(num_classes) +
              " classes on " + std::to_string(n_qubits) + " qubits");
  require(entangler != Entangler::kRing || n_qubits >= 3, "ring entangler needs 3+ qubits");
  noise.validate();
}

CircuitProgram::CircuitProgram(const ModelConfig& cfg)
    : num_qubits_(cfg.n_qubits),
      num_params_(static_cast<std::size_t>(cfg.n_layers) * cfg.n_qubits * 3) {
  cfg.validate();
  const int n = cfg.n_qubits;
  const auto& s = cfg.noise.single;
  param_ops_.assign(num_params_, 0);

  std::optional<PhaseCovariantMap> phase;
  if (s.phase_damping) phase = dephasing_map(gaussian_dephasing_factor(s.mu, s.sigma));
  std::optional<PhaseCovariantMap> depol;
  if (s.depolarizing && s.p_depol > 0.0) depol = depolarizing_map(s.p_depol);
  std::optional<PhaseCovariantMap> thermal;
  if (s.thermal && s.gamma > 0.0) thermal = thermal_map(s.t_tilde, s.gamma);

  auto push_map = [this](const PhaseCovariantMap& m, int q) {
    Op op;
    op.kind = Kind::kCovariant;
    op.target = q;
    op.map = m;
    op.adjoint_map = m.adjoint();
    ops_.push_back(op);
  };
  auto after_factor = [&](int q) {
    if (phase && s.phase_placement == Placement::kPerFactor) push_map(*phase, q);
    if (depol && s.depol_placement == Placement::kPerFactor) push_map(*depol, q);
  };

  for (int i = 0; i + 1 < n; ++i) pairs_.emplace_back(i, i + 1);
  if (cfg.entangler == Entangler::kRing) pairs_.emplace_back(n - 1, 0);

  std::vector<std::size_t> composite_of_pair;
  if (cfg.noise.two_qubit) {
    for (const auto& [a, b] : pairs_) {
      composite_of_pair.push_back(composites_.size());
      composites_.push_back(
          std::make_shared<const CompositeNoiseChannel>(*cfg.noise.two_qubit, a, b, n));
    }
  }

  for (int l = 0; l < cfg.n_layers; ++l) {
    for (int q = 0; q < n; ++q) {
      // gamma first, then beta, then alpha.
      for (int factor : {2, 1, 0}) {
        Op op;
        op.kind = factor == 1 ? Kind::kRotY : Kind::kRotZ;
        op.target = q;
        op.param = CircuitParams::index(n, l, q, factor);
        param_ops_[op.param] = ops_.size();
        ops_.push_back(op);
        after_factor(q);
      }
      if (phase && s.phase_placement == Placement::kPerGate) push_map(*phase, q);
      if (depol && s.depol_placement == Placement::kPerGate) push_map(*depol, q);
      if (thermal) push_map(*thermal, q);
    }
    for (std::size_t e = 0; e < pairs_.size(); ++e) {
      Op op;
      op.kind = Kind::kCZ;
      op.target = pairs_[e].first;
      op.partner = pairs_[e].second;
      ops_.push_back(op);
      if (!composite_of_pair.empty()) {
        Op noise;
        noise.kind = Kind::kComposite;
        noise.composite = composite_of_pair[e];
        ops_.push_back(noise);
      }
    }
  }
}

void CircuitProgram::apply_op(ComplexMatrix& rho, std::size_t index,
                              std::span<const double> thetas,
                              std::optional<std::size_t> shift_param, double shift) const {
  const Op& op = ops_[index];
  switch (op.kind) {
    case Kind::kRotZ:
    case Kind::kRotY: {
      double theta = thetas[op.param];
      if (shift_param && *shift_param == op.param) theta += shift;
      if (op.kind == Kind::kRotZ) {
        apply_phase_covariant(rho, dephasing_map(std::polar(1.0, -theta)), op.target,
                              num_qubits_);
      } else {
        local::conjugate_single(rho, ry_matrix(theta), op.target, num_qubits_);
      }
      break;
    }
    case Kind::kCovariant:
      apply_phase_covariant(rho, op.map, op.target, num_qubits_);
      break;
    case Kind::kCZ:
      apply_cz(rho, op.target, op.partner, num_qubits_);
      break;
    case Kind::kComposite:
      composites_[op.composite]->apply_inplace(rho);
      break;
  }
}

void CircuitProgram::apply_op_adjoint(ComplexMatrix& obs, std::size_t index,
                                      std::span<const double> thetas) const {
  const Op& op = ops_[index];
  switch (op.kind) {
    case Kind::kRotZ:
      apply_phase_covariant(obs, dephasing_map(std::polar(1.0, thetas[op.param])), op.target,
                            num_qubits_);
      break;
    case Kind::kRotY:
      local::conjugate_single(obs, ry_matrix(-thetas[op.param]), op.target, num_qubits_);
      break;
    case Kind::kCovariant:
      apply_phase_covariant(obs, op.adjoint_map, op.target, num_qubits_);
      break;
    case Kind::kCZ:
      apply_cz(obs, op.target, op.partner, num_qubits_);
      break;
    case Kind::kComposite:
      composites_[op.composite]->apply_adjoint_inplace(obs);
      break;
  }
}

void CircuitProgram::run(ComplexMatrix& rho, std::span<const double> thetas,
                         std::optional<std::size_t> shift_param, double shift) const {
  require(thetas.size() >= num_params_, "too few circuit angles");
  require(rho.rows() == (Eigen::Index{1} << num_qubits_) && rho.cols() == rho.rows(),
          "state dimension does not match the circuit");
  for (std::size_t i = 0; i < ops_.size(); ++i) apply_op(rho, i, thetas, shift_param, shift);
}

void CircuitProgram::run_adjoint(ComplexMatrix& obs, std::span<const double> thetas) const {
  require(thetas.size() >= num_params_, "too few circuit angles");
  for (std::size_t i = ops_.size(); i-- > 0;) apply_op_adjoint(obs, i, thetas);
}

DensityMatrix forward(const DensityMatrix& rho0, const CircuitParams& params,
                      const ModelConfig& cfg) {
  return forward(rho0, params, CircuitProgram(cfg));
}

DensityMatrix forward(const DensityMatrix& rho0, const CircuitParams& params,
                      const CircuitProgram& program) {
  require(rho0.num_qubits() == program.num_qubits(), "state dimension does not match the circuit");
  require(params.thetas.size() == program.num_params(), "parameter shape does not match the circuit");
  ComplexMatrix m = rho0.matrix();
  program.run(m, params.thetas);
  return DensityMatrix::trusted(std::move(m));
}

std::vector<double> z_expectations(const DensityMatrix& rho) {
  return z_expectations(rho.matrix(), rho.num_qubits());
}

std::vector<double> z_expectations(const ComplexMatrix& rho, int num_qubits) {
  const std::size_t dim = static_cast<std::size_t>(rho.rows());
  std::vector<double> z(num_qubits, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    const double p = rho(i, i).real();
    for (int q = 0; q < num_qubits; ++q) {
      z[q] += ((i >> (num_qubits - 1 - q)) & 1) ? -p : p;
    }
  }
  for (double& v : z) v = std::clamp(v, -1.0, 1.0);
  return z;
}

ComplexMatrix z_observable(int qubit, int num_qubits) {
  const std::size_t dim = std::size_t{1} << num_qubits;
  ComplexMatrix z = ComplexMatrix::Zero(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    z(i, i) = ((i >> (num_qubits - 1 - qubit)) & 1) ? -1.0 : 1.0;
  }
  return z;
}

double hermitian_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  // tr(a b) = sum_ij a_ij b_ji = sum_ij conj(a_ji) b_ji for Hermitian a.
  const Eigen::Map<const ComplexVector> va(a.data(), a.size());
  const Eigen::Map<const ComplexVector> vb(b.data(), b.size());
  return va.dot(vb).real();
}

std::vector<double> sample_expectations(std::span<const double> z, std::size_t shots,
                                        std::mt19937_64& rng) {
  require(shots >= 1, "shot count must be positive");
  std::vector<double> out(z.size());
  const double n = static_cast<double>(shots);
  for (std::size_t j = 0; j < z.size(); ++j) {
    const double p = std::clamp(0.5 * (1.0 + z[j]), 0.0, 1.0);
    std::binomial_distribution<std::uint64_t> dist(shots, p);
    out[j] = 2.0 * static_cast<double>(dist(rng)) / n - 1.0;
  }
  return out;
}

std::vector<double> sample_expectations(std::span<const double> z, std::size_t shots,
                                        std::uint64_t seed) {
  std::mt19937_64 rng = derived_rng(seed, 0, 0);
  return sample_expectations(z, shots, rng);
}

std::vector<double> sample_expectations_joint(const ComplexMatrix& rho, int num_qubits,
                                              std::size_t shots, std::mt19937_64& rng) {
  require(shots >= 1, "shot count must be positive");
  const std::size_t dim = static_cast<std::size_t>(rho.rows());
  std::vector<double> weights(dim);
  for (std::size_t i = 0; i < dim; ++i) weights[i] = std::max(rho(i, i).real(), 0.0);
  std::discrete_distribution<std::size_t> dist(weights.begin(), weights.end());
  std::vector<double> counts(num_qubits, 0.0);
  for (std::size_t s = 0; s < shots; ++s) {
    const std::size_t outcome = dist(rng);
    for (int q = 0; q < num_qubits; ++q) {
      counts[q] += ((outcome >> (num_qubits - 1 - q)) & 1) ? -1.0 : 1.0;
    }
  }
  for (double& c : counts) c /= static_cast<double>(shots);
  return counts;
}

std::mt19937_64 derived_rng(std::uint64_t seed, std::uint64_t sample, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(sample), static_cast<std::uint32_t>(sample >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

std::vector<double> softmax(std::span<const double> x) {
  require(!x.empty(), "softmax of an empty vector");
  const double top = *std::max_element(x.begin(), x.end());
  std::vector<double> out(x.size());
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::exp(x[i] - top);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

std::vector<double> readout_logits(std::span<const double> z_est, const CircuitParams& params,
                                   const ModelConfig& cfg) {
  const std::size_t k = static_cast<std::size_t>(cfg.num_classes);
  require(z_est.size() >= k, "fewer expectation values than classes");
  std::vector<double> y(k);
  for (std::size_t i = 0; i < k; ++i) y[i] = std::clamp(z_est[i], -1.0, 1.0);
  if (cfg.readout == Readout::kClassical) {
    require(params.classical.has_value(), "classical readout without classical parameters");
    const auto& cl = *params.classical;
    require(cl.weights.size() == k && cl.biases.size() == k,
            "classical layer size does not match the class count");
    for (std::size_t i = 0; i < k; ++i) y[i] = cl.weights[i] * y[i] + cl.biases[i];
  }
  return y;
}

Prediction predict(std::span<const double> z_est, const CircuitParams& params,
                   const ModelConfig& cfg) {
  Prediction p;
  p.z_values.assign(z_est.begin(), z_est.end());
  for (double& v : p.z_values) v = std::clamp(v, -1.0, 1.0);
  p.probs = softmax(readout_logits(z_est, params, cfg));
  // max_element returns the first maximum, so ties go to the lowest index.
  p.label = static_cast<int>(std::max_element(p.probs.begin(), p.probs.end()) - p.probs.begin());
  return p;
}

}  // namespace pqvc
