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

// Model parameters, special functions, and vibronic state constructors for
// the detuned nonlinear Jaynes-Cummings model of a single trapped ion.
//
// Unit conventions, used by every module: hbar = 1, the base coupling
// kappa' = 1 defines the time unit. All times are kappa'*t, all detunings
// are in units of kappa', all energies in units of hbar*kappa'. The
// effective coupling is |kappa| = g*kappa' with g the dimensionless
// coupling_scale, so kappa' itself never enters a formula.

#ifndef NJCM_MODEL_HPP
#define NJCM_MODEL_HPP

#include <Eigen/Core>
#include <complex>
#include <variant>

#include "njcm/errors.hpp"

namespace njcm {

using Complex = std::complex<double>;

struct ModelParams {
  int sideband_order = 0;            // k, vibrational quanta per flip
  double lamb_dicke = 0.2;           // eta
  double detuning = 0.2;             // delta-omega, units of kappa'
  double base_coupling = 1.0;        // kappa', sets the time unit
  double coupling_scale = 1.0;       // g, |kappa| = g*kappa'
  double laser_phase = 0.0;          // theta
  double trap_position_phase = 0.0;  // delta-phi of the standing wave
  double trap_frequency = 5000.0;    // nu, recorded but unused (see below)
  int fock_cutoff = 80;              // N_max

  // Throws ConfigError unless k >= 0, eta > 0, kappa' > 0, g >= 0 and
  // N_max >= 1. Negative g is permitted internally (parity checks) by
  // skipping validation; anything config-derived must pass here first.
  void validate() const;
};

struct ElectronicAmplitudes {
  Complex gamma1{1.0, 0.0};  // amplitude on |1> (ground)
  Complex gamma2{0.0, 0.0};  // amplitude on |2> (excited)

  static ElectronicAmplitudes ground() { return {{1.0, 0.0}, {0.0, 0.0}}; }
  static ElectronicAmplitudes excited() { return {{0.0, 0.0}, {1.0, 0.0}}; }
  // (e^{i pi/2}|1> + |2>)/sqrt(2), the phase choice that zeroes <H(0)>.
  static ElectronicAmplitudes superposition();

  bool is_normalized(double tol = 1e-12) const;
};

struct Fock {
  int n = 0;
};

struct Coherent {
  Complex alpha0{0.0, 0.0};
};

struct NumberDistribution {
  Eigen::VectorXd probs;  // length N_max + 1, sums to 1 within 1e-10
};

using MotionalSpec = std::variant<Fock, Coherent, NumberDistribution>;

// Pure vibronic state on the truncated basis {|1,n>, |2,n> : n <= n_max}.
struct VibronicState {
  int n_max = 0;
  Eigen::VectorXcd amp;  // size 2*(n_max+1): ground block, then excited block

  explicit VibronicState(int n_max_)
      : n_max(n_max_), amp(Eigen::VectorXcd::Zero(2 * (n_max_ + 1))) {}

  Complex& ground(int n) { return amp(n); }
  Complex ground(int n) const { return amp(n); }
  Complex& excited(int n) { return amp(n_max + 1 + n); }
  Complex excited(int n) const { return amp(n_max + 1 + n); }

  double squared_norm() const { return amp.squaredNorm(); }
  // Population of the excited electronic level, traced over motion.
  double excited_population() const {
    return amp.segment(n_max + 1, n_max + 1).squaredNorm();
  }
};

// Generalized Laguerre polynomial L_n^{(k)}(x) by the three-term recurrence
// L_{m+1} = ((2m+k+1-x) L_m - (m+k) L_{m-1}) / (m+1), which is forward
// stable for the x in [0, 1], n <~ 200 regime used here.
template <typename Scalar>
Scalar laguerre(int n, int k, Scalar x) {
  if (n <= 0) return Scalar(1);
  Scalar prev = Scalar(1);
  Scalar cur = Scalar(1 + k) - x;
  for (int m = 1; m < n; ++m) {
    Scalar next =
        ((Scalar(2 * m + k + 1) - x) * cur - Scalar(m + k) * prev) /
        Scalar(m + 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

// cos(dphi + pi k / 2) expanded over the quarter turns so that odd k with
// dphi = 0 gives exactly zero (standing-wave node), not a rounded cos(pi/2).
double standing_wave_cosine(int k, double dphi);

// Diagonal mode function f_k(n; eta) =
//   cos(dphi + pi k/2) eta^k e^{-eta^2/2} [n!/(n+k)!] L_n^{(k)}(eta^2).
double mode_function(const ModelParams& params, int n);

// Rabi weight w_n = f_k(n; eta) sqrt((n+k)!/n!).
double rabi_weight(const ModelParams& params, int n);

// Number statistics P_0..P_{n_max}. Coherent statistics are truncated and
// not renormalized; throws CutoffInsufficient if the tail beyond n_max
// exceeds 1e-12.
Eigen::VectorXd number_statistics(const MotionalSpec& spec, int n_max);

// Fock cutoff rule for coherent states: mean + 10 sigma + 20 margin.
int coherent_cutoff(Complex alpha0);

// Product state electronic (x) motional. NumberDistribution is a mixed
// state and has no amplitude vector: throws WrongBasis.
VibronicState make_state(const ElectronicAmplitudes& electronic,
                         const MotionalSpec& motional, int n_max);

}  // namespace njcm

#endif  // NJCM_MODEL_HPP
