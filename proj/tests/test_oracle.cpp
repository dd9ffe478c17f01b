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

#include <cmath>
#include <limits>
#include <random>

#include <doctest.h>

#include "njcm/analytics.hpp"
#include "njcm/oracle.hpp"
#include "njcm/propagator.hpp"

namespace {

using njcm::Coherent;
using njcm::Complex;
using njcm::ElectronicAmplitudes;
using njcm::Fock;
using njcm::ModelParams;
using njcm::StepSizeUnderflow;
using njcm::VibronicState;

ModelParams test_params(int k, double g) {
  ModelParams p;
  p.sideband_order = k;
  p.coupling_scale = g;
  p.fock_cutoff = 20;
  return p;
}

VibronicState random_state(int n_max, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> gauss;
  VibronicState psi(n_max);
  for (Eigen::Index i = 0; i < psi.amp.size(); ++i)
    psi.amp(i) = Complex(gauss(engine), gauss(engine));
  psi.amp /= std::sqrt(psi.squared_norm());
  return psi;
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("apply_hamiltonian is Hermitian") {
  ModelParams p = test_params(2, 0.8);
  p.laser_phase = 0.6;
  const VibronicState phi = random_state(p.fock_cutoff, 31);
  const VibronicState psi = random_state(p.fock_cutoff, 32);
  const double t = 2.4;
  const Complex lhs = phi.amp.dot(njcm::apply_hamiltonian(p, t, psi).amp);
  const Complex rhs = psi.amp.dot(njcm::apply_hamiltonian(p, t, phi).amp);
  CHECK(std::abs(lhs - std::conj(rhs)) < 1e-12);
}

TEST_CASE("apply_hamiltonian matrix element on a basis pair") {
  ModelParams p = test_params(2, 0.9);
  p.laser_phase = 0.3;
  const double t = 1.7;
  VibronicState psi(p.fock_cutoff);
  psi.ground(2) = 1.0;  // |1, n+k> with n = 0
  const VibronicState hpsi = njcm::apply_hamiltonian(p, t, psi);
  const Complex expected =
      p.coupling_scale * njcm::rabi_weight(p, 0) *
      std::polar(1.0, -p.detuning * t + 2.0 * p.laser_phase);
  CHECK(std::abs(hpsi.excited(0) - expected) < 1e-15);
  // Everything else stays empty.
  CHECK(std::abs(hpsi.amp.norm() - std::abs(expected)) < 1e-15);
}

TEST_CASE("schrodinger integration reproduces the closed-form propagator") {
  for (int k : {0, 2}) {
    ModelParams p = test_params(k, 0.7);
    p.detuning = 0.37;
    const VibronicState psi0 = random_state(p.fock_cutoff, 77);
    for (double t : {0.6, 9.2}) {
      const VibronicState ode =
          njcm::integrate_schrodinger(p, psi0, t, 1e-10);
      const VibronicState exact = njcm::evolve(p, psi0, t);
      CHECK((ode.amp - exact.amp).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("schrodinger integration argument checks") {
  ModelParams p = test_params(0, 1.0);
  const VibronicState psi0 =
      njcm::make_state(ElectronicAmplitudes::ground(), Fock{0}, 4);
  CHECK_THROWS_AS(njcm::integrate_schrodinger(p, psi0, 1.0, 1e-5),
                  std::invalid_argument);
  CHECK_THROWS_AS(njcm::integrate_schrodinger(p, psi0, 1.0, 1e-14),
                  std::invalid_argument);
  CHECK_THROWS_AS(njcm::integrate_schrodinger(p, psi0, -1.0, 1e-10),
                  std::invalid_argument);
  const VibronicState same = njcm::integrate_schrodinger(p, psi0, 0.0, 1e-10);
  CHECK(same.amp == psi0.amp);
}

TEST_CASE("step controller bails out instead of looping forever") {
  ModelParams p = test_params(0, 1.0);
  p.detuning = std::numeric_limits<double>::quiet_NaN();
  const VibronicState psi0 =
      njcm::make_state(ElectronicAmplitudes::ground(), Fock{0}, 4);
  CHECK_THROWS_AS(njcm::integrate_schrodinger(p, psi0, 1.0, 1e-10),
                  StepSizeUnderflow);
}

TEST_CASE("first-order term is the bare Hamiltonian expectation") {
  ModelParams p = test_params(0, 0.8);
  const VibronicState psi0 = njcm::make_state(
      ElectronicAmplitudes::superposition(), Fock{1}, p.fock_cutoff);
  for (double t : {0.0, 3.1, 12.0}) {
    const Complex term = njcm::dyson_term(p, 1, psi0, t, 1e-9);
    const double expected = njcm::h_expectation_fock(
        p, ElectronicAmplitudes::superposition(), 1, t);
    CHECK(term.real() == doctest::Approx(expected).epsilon(1e-12));
    CHECK(std::abs(term.imag()) < 1e-12);
  }
}

TEST_CASE("second-order term matches the closed-form commutator") {
  const Complex alpha0{std::sqrt(12.0), 0.0};
  for (int k : {0, 2}) {
    ModelParams p = test_params(k, 1.0);
    p.fock_cutoff = njcm::coherent_cutoff(alpha0);
    const VibronicState psi0 = njcm::make_state(
        ElectronicAmplitudes::ground(), Coherent{alpha0}, p.fock_cutoff);
    for (double t : {2.3, 7.9}) {
      const Complex term = njcm::dyson_term(p, 2, psi0, t, 1e-9);
      const double expected = njcm::commutator_expectation(p, alpha0, t);
      CHECK(term.real() ==
            doctest::Approx(expected).epsilon(1e-6));
      CHECK(std::abs(term.imag()) < 1e-12);
    }
  }
}

TEST_CASE("dyson term argument checks") {
  ModelParams p = test_params(0, 1.0);
  const VibronicState psi0 =
      njcm::make_state(ElectronicAmplitudes::ground(), Fock{0}, 4);
  CHECK_THROWS_AS(njcm::dyson_term(p, 3, psi0, 1.0, 1e-9),
                  std::invalid_argument);
  CHECK_THROWS_AS(njcm::dyson_term(p, 2, psi0, -1.0, 1e-9),
                  std::invalid_argument);
  CHECK_THROWS_AS(njcm::dyson_term(p, 2, psi0, 1.0, 0.0),
                  std::invalid_argument);
  CHECK(njcm::dyson_term(p, 2, psi0, 0.0, 1e-9) == Complex{0.0, 0.0});
}

}  // TEST_SUITE("oracle")
