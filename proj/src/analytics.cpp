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

#include "njcm/analytics.hpp"

#include <cmath>

namespace njcm {

namespace {

void require_carrier(const ModelParams& params, const char* op) {
  if (params.sideband_order != 0)
    throw WrongSideband(std::string(op) + " requires the carrier k = 0, got k = " +
                        std::to_string(params.sideband_order));
}

void require_detuned(const ModelParams& params, const char* op) {
  if (params.detuning == 0.0)
    throw ZeroDetuning(std::string(op) +
                       " is vacuous at zero detuning (both sides vanish)");
}

}  // namespace

double h_expectation_t0(const ModelParams& params,
                        const ElectronicAmplitudes& electronic, int n) {
  require_carrier(params, "h_expectation_t0");
  const Complex cross = electronic.gamma1 * std::conj(electronic.gamma2);
  return params.coupling_scale * mode_function(params, n) * 2.0 *
         cross.real();
}

double h_expectation_fock(const ModelParams& params,
                          const ElectronicAmplitudes& electronic, int n,
                          double t) {
  require_carrier(params, "h_expectation_fock");
  const Complex cross = electronic.gamma1 * std::conj(electronic.gamma2) *
                        std::polar(1.0, -params.detuning * t);
  return params.coupling_scale * mode_function(params, n) * 2.0 *
         cross.real();
}

double h_expectation_general(const ModelParams& params,
                             const ElectronicAmplitudes& electronic,
                             const Eigen::VectorXd& probs, double t) {
  require_carrier(params, "h_expectation_general");
  const Complex cross = electronic.gamma1 * std::conj(electronic.gamma2) *
                        std::polar(1.0, -params.detuning * t);
  double weighted = 0.0;
  for (Eigen::Index n = 0; n < probs.size(); ++n)
    weighted += probs(n) * mode_function(params, static_cast<int>(n));
  return params.coupling_scale * weighted * 2.0 * cross.real();
}

double h_from_sigma22(const ModelParams& params, double sigma22_t,
                      double sigma22_0) {
  require_detuned(params, "h_from_sigma22");
  return params.detuning * (sigma22_t - sigma22_0);
}

double commutator_expectation(const ModelParams& params, Complex alpha0,
                              double t) {
  require_detuned(params, "commutator_expectation");
  const int k = params.sideband_order;
  const double a2 = std::norm(alpha0);
  double sum = 0.0;
  for (int n = 0; n + k <= params.fock_cutoff; ++n) {
    const double f = mode_function(params, n);
    double weight;
    if (a2 == 0.0) {
      weight = (n + k) == 0 ? 1.0 : 0.0;
    } else {
      weight = std::exp(-a2 + (n + k) * std::log(a2) -
                        std::lgamma(static_cast<double>(n) + 1.0));
    }
    sum += f * f * weight;
  }
  const double g = params.coupling_scale;
  return 2.0 * g * g / params.detuning *
         (1.0 - std::cos(params.detuning * t)) * sum;
}

double commutator_expectation_weight_form(const ModelParams& params,
                                          Complex alpha0, double t) {
  require_detuned(params, "commutator_expectation_weight_form");
  const int k = params.sideband_order;
  const Eigen::VectorXd probs =
      number_statistics(Coherent{alpha0}, params.fock_cutoff);
  double sum = 0.0;
  for (int n = 0; n + k <= params.fock_cutoff; ++n) {
    const double w = rabi_weight(params, n);
    sum += w * w * probs(n + k);
  }
  const double g = params.coupling_scale;
  return 2.0 * g * g / params.detuning *
         (1.0 - std::cos(params.detuning * t)) * sum;
}

}  // namespace njcm
