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

// Closed-form reference expressions used as ground truth by the tests and
// as overlay curves in figure data. All energies in units of hbar*kappa'.

#ifndef NJCM_ANALYTICS_HPP
#define NJCM_ANALYTICS_HPP

#include <Eigen/Core>

#include "njcm/model.hpp"

namespace njcm {

// <H_I(0)> on |electronic> (x) |n> for the carrier:
// |kappa| f_0(n;eta) * 2 Re(gamma1 gamma2*). Requires k = 0.
double h_expectation_t0(const ModelParams& params,
                        const ElectronicAmplitudes& electronic, int n);

// <H_I(t)> on the unevolved state:
// |kappa| f_0(n;eta) * 2 Re(gamma1 gamma2* e^{-i dw t}). Requires k = 0.
double h_expectation_fock(const ModelParams& params,
                          const ElectronicAmplitudes& electronic, int n,
                          double t);

// Number-statistics mixture of h_expectation_fock. Requires k = 0.
double h_expectation_general(const ModelParams& params,
                             const ElectronicAmplitudes& electronic,
                             const Eigen::VectorXd& probs, double t);

// hbar dw (sigma22(t) - sigma22(0)), the operational route to the evolved
// Hamiltonian expectation. Requires dw != 0 (both sides vanish otherwise).
double h_from_sigma22(const ModelParams& params, double sigma22_t,
                      double sigma22_0);

// Partly time-integrated non-equal-time commutator expectation for the
// input |1> (x) |alpha0>:
//   (2 |kappa|^2 / dw) (1 - cos dw t) sum_n f_k(n;eta)^2
//     |alpha0|^{2(n+k)} e^{-|alpha0|^2} / n!,
// truncated at the params cutoff. Requires dw != 0.
double commutator_expectation(const ModelParams& params, Complex alpha0,
                              double t);

// Same quantity via the algebraically identical Rabi-weight form
// (2 |kappa|^2 / dw)(1 - cos dw t) sum_n w_n^2 P_{n+k}.
double commutator_expectation_weight_form(const ModelParams& params,
                                          Complex alpha0, double t);

}  // namespace njcm

#endif  // NJCM_ANALYTICS_HPP
