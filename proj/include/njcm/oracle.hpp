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

// Brute-force validators, independent of the closed-form propagator:
// direct adaptive integration of i d|psi>/dt = H_I(t) |psi> (time ordering
// holds by construction) and direct quadrature of the low-order terms of
// the time-ordered expansion.

#ifndef NJCM_ORACLE_HPP
#define NJCM_ORACLE_HPP

#include "njcm/model.hpp"

namespace njcm {

// (H_I(t) / hbar kappa') |psi> in the truncated basis:
//   H |1,n+k> = g e^{-i dw t + 2 i theta} w_n |2,n>, plus the conjugate.
VibronicState apply_hamiltonian(const ModelParams& params, double t,
                                const VibronicState& psi);

// Dormand-Prince 5(4) adaptive integration from 0 to t. tol acts as both
// relative and absolute local tolerance per step; requires
// tol in [1e-13, 1e-6]. Throws StepSizeUnderflow if the controller stalls.
VibronicState integrate_schrodinger(const ModelParams& params,
                                    const VibronicState& state0, double t,
                                    double tol);

// Low-order terms of the time-ordered expansion on state0, units of
// hbar*kappa'. order 1: <H_I(t)> with no evolution. order 2: the partly
// integrated non-equal-time commutator
//   (i/hbar) \int_0^t dtau <[H_I(tau), H_I(t)]>,
// by adaptive Simpson quadrature. Throws QuadratureNotConverged if the
// refinement depth limit is hit.
Complex dyson_term(const ModelParams& params, int order,
                   const VibronicState& state0, double t,
                   double quadrature_tol);

}  // namespace njcm

#endif  // NJCM_ORACLE_HPP
