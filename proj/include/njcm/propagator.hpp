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

// Exact closed-form interaction-picture evolution. Each pair
// (|2,n>, |1,n+k>) evolves under the 2x2 unitary
//   [  a_n           b_n e^{2 i theta} ]
//   [ -b_n* e^{-2 i theta}   a_n*      ]
// with
//   a_n = e^{-i dw t/2} [cos(G_n t) + (i dw / 2 G_n) sin(G_n t)],
//   b_n = e^{-i dw t/2} (|kappa| w_n / (i G_n)) sin(G_n t),
//   G_n = sqrt((dw/2)^2 + w_n^2 |kappa|^2),
// while |1,q> with q < k are spectators.

#ifndef NJCM_PROPAGATOR_HPP
#define NJCM_PROPAGATOR_HPP

#include <Eigen/Core>

#include "njcm/model.hpp"

namespace njcm {

struct BlockCoefficients {
  int n = 0;
  Complex a_n{1.0, 0.0};
  Complex b_n{0.0, 0.0};
  double gamma_n = 0.0;  // block Rabi frequency G_n, units of kappa'
  double w_n = 0.0;
};

// sin(x t)/x with the series branch for |x t| < 1e-6, total at x = 0.
double sinc_factor(double x, double t);

// Exact block coefficients at time t (units 1/kappa').
BlockCoefficients block_coeffs(const ModelParams& params, int n, double t);

// Applies the block-diagonal closed-form unitary. Requires a normalized
// input state on the same cutoff; norm is preserved exactly.
VibronicState evolve(const ModelParams& params, const VibronicState& state0,
                     double t);

// Excited-state occupation probability after evolution, traced over motion.
// NumberDistribution inputs are handled as incoherent Fock mixtures.
double sigma22_exact(const ModelParams& params,
                     const ElectronicAmplitudes& electronic,
                     const MotionalSpec& motional, double t);

// Elementwise sigma22_exact with coupling_scale replaced per grid entry.
Eigen::VectorXd sigma22_series(const ModelParams& params,
                               const ElectronicAmplitudes& electronic,
                               const MotionalSpec& motional, double t,
                               const Eigen::VectorXd& g_grid);

}  // namespace njcm

#endif  // NJCM_PROPAGATOR_HPP
