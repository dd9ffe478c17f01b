// Copyright 2026 The njcm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "njcm/model.hpp"

#include <cmath>
#include <string>

namespace njcm {

namespace {

constexpr double kTailBudget = 1e-12;

// log(n!) without overflow.
double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

// Poisson weight e^{-a2} a2^n / n! for a2 = |alpha0|^2.
double poisson_weight(double a2, int n) {
  if (a2 == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(-a2 + n * std::log(a2) - log_factorial(n));
}

}  // namespace

void ModelParams::validate() const {
  if (sideband_order < 0)
    throw ConfigError("sideband_order must be >= 0, got " +
                      std::to_string(sideband_order));
  if (!(lamb_dicke > 0.0))
    throw ConfigError("lamb_dicke must be > 0, got " +
                      std::to_string(lamb_dicke));
  if (!(base_coupling > 0.0))
    throw ConfigError("base_coupling must be > 0, got " +
                      std::to_string(base_coupling));
  if (!(coupling_scale >= 0.0))
    throw ConfigError("coupling_scale must be >= 0, got " +
                      std::to_string(coupling_scale));
  if (fock_cutoff < 1)
    throw ConfigError("fock_cutoff must be >= 1, got " +
                      std::to_string(fock_cutoff));
  if (!std::isfinite(detuning) || !std::isfinite(laser_phase) ||
      !std::isfinite(trap_position_phase) || !std::isfinite(trap_frequency))
    throw ConfigError("model parameters must be finite");
}

ElectronicAmplitudes ElectronicAmplitudes::superposition() {
  const double r = 1.0 / std::sqrt(2.0);
  return {{0.0, r}, {r, 0.0}};
}

bool ElectronicAmplitudes::is_normalized(double tol) const {
  return std::abs(std::norm(gamma1) + std::norm(gamma2) - 1.0) <= tol;
}

double standing_wave_cosine(int k, double dphi) {
  static constexpr double kCos[4] = {1.0, 0.0, -1.0, 0.0};
  static constexpr double kSin[4] = {0.0, 1.0, 0.0, -1.0};
  const int r = k & 3;
  return kCos[r] * std::cos(dphi) - kSin[r] * std::sin(dphi);
}

double mode_function(const ModelParams& params, int n) {
  const int k = params.sideband_order;
  const double eta = params.lamb_dicke;
  const double x = eta * eta;
  double inv_ratio = 1.0;  // n!/(n+k)! accumulated as a product of inverses
  for (int j = 1; j <= k; ++j) inv_ratio /= static_cast<double>(n + j);
  return standing_wave_cosine(k, params.trap_position_phase) *
         std::pow(eta, k) * std::exp(-0.5 * x) * inv_ratio * laguerre(n, k, x);
}

double rabi_weight(const ModelParams& params, int n) {
  double root = 1.0;  // sqrt((n+k)!/n!)
  for (int j = 1; j <= params.sideband_order; ++j)
    root *= std::sqrt(static_cast<double>(n + j));
  return mode_function(params, n) * root;
}

Eigen::VectorXd number_statistics(const MotionalSpec& spec, int n_max) {
  if (n_max < 0) throw ConfigError("n_max must be >= 0");
  Eigen::VectorXd probs = Eigen::VectorXd::Zero(n_max + 1);
  if (const auto* fock = std::get_if<Fock>(&spec)) {
    if (fock->n < 0 || fock->n > n_max)
      throw ConfigError("Fock index " + std::to_string(fock->n) +
                        " outside [0, " + std::to_string(n_max) + "]");
    probs(fock->n) = 1.0;
    return probs;
  }
  if (const auto* coh = std::get_if<Coherent>(&spec)) {
    const double a2 = std::norm(coh->alpha0);
    for (int n = 0; n <= n_max; ++n) probs(n) = poisson_weight(a2, n);
    const double tail = std::max(0.0, 1.0 - probs.sum());
    if (tail > kTailBudget)
      throw CutoffInsufficient(
          "coherent tail mass beyond n_max = " + std::to_string(n_max) +
          " is " + std::to_string(tail) + " (budget 1e-12)");
    return probs;
  }
  const auto& dist = std::get<NumberDistribution>(spec);
  if (dist.probs.size() != n_max + 1)
    throw ConfigError("number distribution length " +
                      std::to_string(dist.probs.size()) + " != n_max + 1 = " +
                      std::to_string(n_max + 1));
  if (dist.probs.minCoeff() < 0.0)
    throw ConfigError("number distribution has negative entries");
  if (std::abs(dist.probs.sum() - 1.0) > 1e-10)
    throw ConfigError("number distribution sums to " +
                      std::to_string(dist.probs.sum()) + ", expected 1");
  return dist.probs;
}

int coherent_cutoff(Complex alpha0) {
  const double a2 = std::norm(alpha0);
  return static_cast<int>(
      std::ceil(a2 + 10.0 * std::sqrt(std::max(a2, 1.0)) + 20.0));
}

VibronicState make_state(const ElectronicAmplitudes& electronic,
                         const MotionalSpec& motional, int n_max) {
  if (!electronic.is_normalized())
    throw ConfigError("electronic amplitudes are not normalized");
  if (std::holds_alternative<NumberDistribution>(motional))
    throw WrongBasis("a number distribution is mixed; no pure state exists");

  VibronicState state(n_max);
  if (const auto* fock = std::get_if<Fock>(&motional)) {
    if (fock->n < 0 || fock->n > n_max)
      throw ConfigError("Fock index outside truncated basis");
    state.ground(fock->n) = electronic.gamma1;
    state.excited(fock->n) = electronic.gamma2;
    return state;
  }
  const auto& coh = std::get<Coherent>(motional);
  const double a2 = std::norm(coh.alpha0);
  // Tail check identical to number_statistics so both paths agree on when a
  // cutoff is acceptable.
  double mass = 0.0;
  const double phase = std::arg(coh.alpha0);
  for (int n = 0; n <= n_max; ++n) {
    double abs_amp;
    if (a2 == 0.0) {
      abs_amp = n == 0 ? 1.0 : 0.0;
    } else {
      abs_amp = std::exp(0.5 * (-a2 + n * std::log(a2) - log_factorial(n)));
    }
    const Complex amp = std::polar(abs_amp, phase * n);
    state.ground(n) = electronic.gamma1 * amp;
    state.excited(n) = electronic.gamma2 * amp;
    mass += abs_amp * abs_amp;
  }
  if (std::max(0.0, 1.0 - mass) > kTailBudget)
    throw CutoffInsufficient("coherent tail mass beyond n_max exceeds 1e-12");
  return state;
}

}  // namespace njcm
