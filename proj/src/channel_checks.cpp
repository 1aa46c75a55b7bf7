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

#include "pqvc/channel_checks.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "pqvc/channels.hpp"
#include "pqvc/gates.hpp"

namespace pqvc {
namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

PropertyResult finish(std::string name, double worst, double tolerance, bool ok,
                      std::string detail = {}) {
  return PropertyResult{std::move(name), ok, worst, tolerance, std::move(detail)};
}

ComplexMatrix conj_by(const ComplexMatrix& u, const ComplexMatrix& rho) {
  return u * rho * u.adjoint();
}

// Kraus completeness for depolarizing and thermal channels.
PropertyResult check_completeness(const ChannelCheckOptions& o, Rng& rng) {
  double worst = 0.0;
  for (std::size_t i = 0; i < o.draws; ++i) {
    worst = std::max(worst, depolarizing_kraus(uniform(rng, 0.0, 0.75)).completeness_error());
    const double t = std::exp(uniform(rng, std::log(0.01), std::log(100.0)));
    worst = std::max(worst, thermal_kraus(t, uniform(rng, 0.0, 1.0)).completeness_error());
  }
  return finish("kraus_completeness", worst, 1e-10, worst <= 1e-10);
}

// Every channel keeps trace, Hermiticity and positivity on random states.
PropertyResult check_trace_hermiticity(const ChannelCheckOptions& o, Rng& rng) {
  double worst = 0.0;
  double min_eig = 0.0;
  auto record = [&](const ComplexMatrix& out) {
    const DensityCheck c = check_density(out);
    worst = std::max({worst, c.trace_error, c.hermiticity_error});
    min_eig = std::min(min_eig, c.min_eigenvalue);
  };
  const int n = 3;
  for (std::size_t i = 0; i < o.draws; ++i) {
    const DensityMatrix rho = DensityMatrix::trusted(random_density(n, rng));
    const int target = static_cast<int>(rng() % n);
    const std::array<int, 1> t{target};
    record(apply_channel(rho, depolarizing_kraus(uniform(rng, 0.0, 0.75)), t).matrix());
    record(apply_channel(rho, thermal_kraus(uniform(rng, 0.01, 5.0), uniform(rng, 0.0, 1.0)), t)
               .matrix());
    record(gaussian_phase_damping_apply(rho, uniform(rng, -3.0, 3.0), uniform(rng, 0.0, 2.0),
                                        target)
               .matrix());
    const TwoQubitNoise tq{uniform(rng, 0.0, 0.5), uniform(rng, -0.5, 0.5)};
    record(CompositeNoiseChannel(tq, 0, 1, n).apply(rho).matrix());
  }
  std::ostringstream d;
  d << "min eigenvalue " << min_eig;
  return finish("trace_hermiticity_preservation", worst, 1e-10, worst <= 1e-10 && min_eig >= -1e-9,
                d.str());
}

// Depolarizing commutes with any single-qubit unitary.
PropertyResult check_commutation(const ChannelCheckOptions& o, Rng& rng) {
  double worst = 0.0;
  for (std::size_t i = 0; i < o.draws; ++i) {
    const ComplexMatrix u = random_qubit_unitary(rng);
    const KrausChannel dep = depolarizing_kraus(uniform(rng, 0.0, 0.75));
    const DensityMatrix rho = DensityMatrix::trusted(random_density(1, rng));
    const std::array<int, 1> t{0};
    const ComplexMatrix a = conj_by(u, apply_channel(rho, dep, t).matrix());
    const ComplexMatrix b =
        apply_channel(DensityMatrix::trusted(conj_by(u, rho.matrix())), dep, t).matrix();
    worst = std::max(worst, max_abs_diff(a, b));
  }
  return finish("depolarizing_unitary_commutation", worst, 1e-12, worst <= 1e-12);
}

// Closed-form Gaussian dephasing against Monte Carlo over R_Z(theta),
// theta ~ N(mu, sigma^2). The statistic is |closed - mc| / SE with SE the
// standard error of the complex Monte Carlo mean.
PropertyResult check_gaussian_monte_carlo(const ChannelCheckOptions& o, Rng& rng) {
  double worst = 0.0;
  for (std::size_t i = 0; i < o.draws; ++i) {
    const double mu = uniform(rng, -std::numbers::pi, std::numbers::pi);
    const double sigma = uniform(rng, 0.05, 2.0);
    // Coherence of |+><+| after the channel is 0.5 E[e^{-i theta}].
    Complex closed = 0.5 * gaussian_dephasing_factor(mu, sigma);
    if (o.inject_wrong_dephasing) closed *= std::exp(-0.5 * sigma * sigma);
    std::normal_distribution<double> theta(mu, sigma);
    double sr = 0.0, si = 0.0, sr2 = 0.0, si2 = 0.0;
    for (std::size_t s = 0; s < o.mc_samples; ++s) {
      const double th = theta(rng);
      const double re = 0.5 * std::cos(th);
      const double im = -0.5 * std::sin(th);
      sr += re;
      si += im;
      sr2 += re * re;
      si2 += im * im;
    }
    const double n = static_cast<double>(o.mc_samples);
    const double mr = sr / n, mi = si / n;
    const double var = (sr2 / n - mr * mr) + (si2 / n - mi * mi);
    const double se = std::sqrt(std::max(var, 1e-300) / n);
    worst = std::max(worst, std::abs(closed - Complex(mr, mi)) / se);
  }
  return finish("gaussian_closed_form_vs_monte_carlo", worst, 3.0, worst <= 3.0,
                "deviation in standard errors");
}

// Mean over-rotation equals zero-mean dephasing after a compensated gate:
// E_mu(R_Z(-mu) U rho U^dag R_Z(-mu)^dag) = E_0(U rho U^dag).
PropertyResult check_mean_compensation(const ChannelCheckOptions& o, Rng& rng) {
  double worst = 0.0;
  for (std::size_t i = 0; i < o.draws; ++i) {
    const double mu = uniform(rng, -std::numbers::pi, std::numbers::pi);
    const double sigma = uniform(rng, 0.0, 1.5);
    const ComplexMatrix u = random_qubit_unitary(rng);
    const ComplexMatrix rho = random_density(1, rng);
    const ComplexMatrix lam0 = conj_by(u, rho);
    const ComplexMatrix lam_mu = conj_by(rot_named(Pauli::Z, -mu), lam0);
    const ComplexMatrix lhs =
        gaussian_phase_damping_apply(DensityMatrix::trusted(lam_mu), mu, sigma, 0).matrix();
    const ComplexMatrix rhs =
        gaussian_phase_damping_apply(DensityMatrix::trusted(lam0), 0.0, sigma, 0).matrix();
    worst = std::max(worst, max_abs_diff(lhs, rhs));
  }
  return finish("phase_mean_compensation_identity", worst, 1e-12, worst <= 1e-12);
}

// Low-temperature thermal damping purifies the maximally mixed state.
PropertyResult check_thermal_purity() {
  double smallest_gain = std::numeric_limits<double>::infinity();
  const DensityMatrix mixed = DensityMatrix::maximally_mixed(1);
  const std::array<int, 1> t{0};
  for (double gamma : {1e-3, 1e-1, 1.0}) {
    const double gain = apply_channel(mixed, thermal_kraus(0.01, gamma), t).purity() -
                        mixed.purity();
    smallest_gain = std::min(smallest_gain, gain);
  }
  return finish("thermal_purity_increase", smallest_gain, 0.0, smallest_gain > 0.0,
                "smallest purity gain over gamma in {1e-3, 1e-1, 1}");
}

// exp of the depolarizing generator reproduces the Kraus channel.
PropertyResult check_lindblad_kraus(const ChannelCheckOptions& o, Rng& rng) {
  double worst = 0.0;
  const std::size_t draws = std::min<std::size_t>(o.draws, 100);
  for (std::size_t i = 0; i < draws; ++i) {
    const double p = uniform(rng, 0.0, 0.74);
    const ComplexMatrix a = lindblad_depolarizing(p).propagator();
    worst = std::max(worst, max_abs_diff(a, depolarizing_kraus(p).superoperator()));
  }
  return finish("lindblad_depolarizing_matches_kraus", worst, 1e-9, worst <= 1e-9);
}

}  // namespace

ComplexMatrix random_density(int num_qubits, std::mt19937_64& rng) {
  const Eigen::Index d = Eigen::Index{1} << num_qubits;
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix a(d, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) a(r, c) = Complex(g(rng), g(rng));
  }
  ComplexMatrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  // Exact Hermiticity regardless of rounding in the product.
  return 0.5 * (rho + rho.adjoint());
}

ComplexMatrix random_qubit_unitary(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::array<double, 3> v{g(rng), g(rng), g(rng)};
  const double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  for (double& x : v) x /= norm;
  return rot_axis(AxisAngle{v, uniform(rng, -2.0 * std::numbers::pi, 2.0 * std::numbers::pi)});
}

std::vector<PropertyResult> run_channel_checks(const ChannelCheckOptions& options) {
  std::vector<PropertyResult> out;
  // Each property draws from its own stream so adding draws to one does not
  // shift the others.
  auto rng_for = [&](std::uint64_t k) {
    std::seed_seq seq{static_cast<std::uint32_t>(options.seed),
                      static_cast<std::uint32_t>(options.seed >> 32),
                      static_cast<std::uint32_t>(k)};
    return Rng(seq);
  };
  Rng r1 = rng_for(1), r2 = rng_for(2), r3 = rng_for(3), r4 = rng_for(4), r5 = rng_for(5),
      r6 = rng_for(6);
  out.push_back(check_completeness(options, r1));
  out.push_back(check_trace_hermiticity(options, r2));
  out.push_back(check_commutation(options, r3));
  out.push_back(check_gaussian_monte_carlo(options, r4));
  out.push_back(check_mean_compensation(options, r5));
  out.push_back(check_thermal_purity());
  out.push_back(check_lindblad_kraus(options, r6));
  return out;
}

}  // namespace pqvc
