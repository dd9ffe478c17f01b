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

#include "njcm/propagator.hpp"

#include <cmath>

namespace njcm {

double sinc_factor(double x, double t) {
  const double xt = x * t;
  if (std::abs(xt) < 1e-6) {
    return t * (1.0 - xt * xt / 6.0);
  }
  return std::sin(xt) / x;
}

BlockCoefficients block_coeffs(const ModelParams& params, int n, double t) {
  BlockCoefficients c;
  c.n = n;
  c.w_n = rabi_weight(params, n);
  const double dw = params.detuning;
  const double kw = params.coupling_scale * c.w_n;  // |kappa| w_n, kappa' units
  c.gamma_n = std::hypot(0.5 * dw, kw);
  const double cos_gt = std::cos(c.gamma_n * t);
  const double sin_over_g = sinc_factor(c.gamma_n, t);
  const Complex half_phase = std::polar(1.0, -0.5 * dw * t);
  c.a_n = half_phase * Complex(cos_gt, 0.5 * dw * sin_over_g);
  c.b_n = half_phase * Complex(0.0, -kw * sin_over_g);
  return c;
}

VibronicState evolve(const ModelParams& params, const VibronicState& state0,
                     double t) {
  if (std::abs(state0.squared_norm() - 1.0) > 1e-10)
    throw ConfigError("evolve requires a normalized input state");
  const int k = params.sideband_order;
  const int n_max = state0.n_max;
  const Complex ph = std::polar(1.0, 2.0 * params.laser_phase);

  VibronicState out = state0;
  for (int n = 0; n + k <= n_max; ++n) {
    const BlockCoefficients c = block_coeffs(params, n, t);
    const Complex e2 = state0.excited(n);
    const Complex g1 = state0.ground(n + k);
    out.excited(n) = c.a_n * e2 + c.b_n * ph * g1;
    out.ground(n + k) = -std::conj(c.b_n * ph) * e2 + std::conj(c.a_n) * g1;
  }
  // |1,q> for q < k and |2,n> for n + k > n_max have no partner in the
  // truncated basis and stay untouched.
  return out;
}

namespace {

double sigma22_pure(const ModelParams& params,
                    const ElectronicAmplitudes& electronic, int fock_n,
                    double t, int n_max) {
  VibronicState psi = make_state(electronic, Fock{fock_n}, n_max);
  return evolve(params, psi, t).excited_population();
}

}  // namespace

double sigma22_exact(const ModelParams& params,
                     const ElectronicAmplitudes& electronic,
                     const MotionalSpec& motional, double t) {
  const int n_max = params.fock_cutoff;
  if (std::holds_alternative<Coherent>(motional)) {
    VibronicState psi = make_state(electronic, motional, n_max);
    return evolve(params, psi, t).excited_population();
  }
  if (const auto* fock = std::get_if<Fock>(&motional)) {
    return sigma22_pure(params, electronic, fock->n, t, n_max);
  }
  // Incoherent mixture over Fock states.
  const Eigen::VectorXd probs = number_statistics(motional, n_max);
  double sigma = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    if (probs(n) == 0.0) continue;
    sigma += probs(n) * sigma22_pure(params, electronic, n, t, n_max);
  }
  return sigma;
}

Eigen::VectorXd sigma22_series(const ModelParams& params,
                               const ElectronicAmplitudes& electronic,
                               const MotionalSpec& motional, double t,
                               const Eigen::VectorXd& g_grid) {
  Eigen::VectorXd out(g_grid.size());
  ModelParams p = params;
  for (Eigen::Index i = 0; i < g_grid.size(); ++i) {
    p.coupling_scale = g_grid(i);
    out(i) = sigma22_exact(p, electronic, motional, t);
  }
  return out;
}

}  // namespace njcm
