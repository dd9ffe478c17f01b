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
#include <vector>

#include <doctest.h>

#include "njcm/analytics.hpp"
#include "njcm/estimation.hpp"
#include "njcm/propagator.hpp"

namespace {

using njcm::Coherent;
using njcm::Complex;
using njcm::ConfigError;
using njcm::DegenerateWeights;
using njcm::ElectronicAmplitudes;
using njcm::EnergyEstimate;
using njcm::FitBasis;
using njcm::FitResult;
using njcm::Fock;
using njcm::MeasurementRecord;
using njcm::ModelParams;
using njcm::Parity;
using njcm::SeedSpec;
using njcm::SingularDesign;
using njcm::WrongBasis;

Eigen::VectorXd default_grid(int count, double max) {
  Eigen::VectorXd g(count);
  for (int i = 0; i < count; ++i) g(i) = max * (i + 1) / count;
  return g;
}

std::vector<MeasurementRecord> records_from_probs(
    const Eigen::VectorXd& grid, const Eigen::VectorXd& probs, double t,
    long long shots) {
  std::vector<MeasurementRecord> records(
      static_cast<std::size_t>(grid.size()));
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    auto& r = records[static_cast<std::size_t>(i)];
    r.g = grid(i);
    r.t = t;
    r.shots = shots;
    r.p_hat = probs(i);
    r.successes = std::llround(probs(i) * static_cast<double>(shots));
  }
  return records;
}

FitResult handmade_fit(Parity parity, double offset, double c, double var) {
  FitResult fit;
  fit.coefficients = Eigen::VectorXd::Constant(1, c);
  fit.covariance = Eigen::MatrixXd::Constant(1, 1, var);
  fit.parity = parity;
  fit.max_power = parity == Parity::Odd ? 1 : 2;
  fit.offset = offset;
  return fit;
}

}  // namespace

TEST_SUITE("estimation") {

TEST_CASE("fit basis powers and validation") {
  FitBasis odd{Parity::Odd, 5};
  CHECK(odd.powers() == std::vector<int>{1, 3, 5});
  FitBasis even{Parity::Even, 6};
  CHECK(even.powers() == std::vector<int>{2, 4, 6});
  CHECK(FitBasis{Parity::Odd, 1}.powers() == std::vector<int>{1});
  CHECK_THROWS_AS((FitBasis{Parity::Odd, 4}.validate()), ConfigError);
  CHECK_THROWS_AS((FitBasis{Parity::Even, 5}.validate()), ConfigError);
  CHECK_THROWS_AS((FitBasis{Parity::Even, 0}.validate()), ConfigError);
}

TEST_CASE("exact polynomial data is interpolated") {
  const Eigen::VectorXd grid = default_grid(6, 0.3);
  Eigen::VectorXd probs(6);
  for (Eigen::Index i = 0; i < 6; ++i) {
    const double g = grid(i);
    probs(i) = 0.5 + 0.3 * g + 0.01 * g * g * g;
  }
  const auto records = records_from_probs(grid, probs, 10.0, 1000);
  const FitResult fit =
      njcm::fit_parity_polynomial(records, FitBasis{Parity::Odd, 3}, 0.5);
  CHECK(fit.coefficients(0) == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(fit.coefficients(1) == doctest::Approx(0.01).epsilon(1e-6));
  CHECK(fit.residual_rms < 1e-12);
  CHECK(fit.condition_number > 1.0);
}

TEST_CASE("fit rejects malformed records") {
  const Eigen::VectorXd grid = default_grid(6, 0.3);
  const Eigen::VectorXd probs = Eigen::VectorXd::Constant(6, 0.4);
  auto records = records_from_probs(grid, probs, 10.0, 1000);
  records[2].shots = 0;
  CHECK_THROWS_AS(
      njcm::fit_parity_polynomial(records, FitBasis{Parity::Odd, 3}, 0.5),
      std::invalid_argument);
  records[2].shots = 1000;
  records[2].p_hat = 1.5;
  CHECK_THROWS_AS(
      njcm::fit_parity_polynomial(records, FitBasis{Parity::Odd, 3}, 0.5),
      std::invalid_argument);
  CHECK_THROWS_AS(
      njcm::fit_parity_polynomial({}, FitBasis{Parity::Odd, 3}, 0.5),
      std::invalid_argument);
}

TEST_CASE("too few distinct couplings is a singular design") {
  std::vector<MeasurementRecord> records(5);
  for (auto& r : records) {
    r.g = 0.03;
    r.t = 10.0;
    r.shots = 100;
    r.successes = 52;
    r.p_hat = 0.52;
  }
  CHECK_THROWS_AS(
      njcm::fit_parity_polynomial(records, FitBasis{Parity::Odd, 3}, 0.5),
      SingularDesign);
}

TEST_CASE("overstretched basis overflows the condition bound") {
  const Eigen::VectorXd grid = default_grid(20, 0.05);
  const Eigen::VectorXd probs = Eigen::VectorXd::Constant(20, 0.5);
  const auto records = records_from_probs(grid, probs, 10.0, 1000);
  CHECK_THROWS_AS(
      njcm::fit_parity_polynomial(records, FitBasis{Parity::Even, 12}, 0.0),
      SingularDesign);
}

TEST_CASE("all-saturated frequencies are degenerate") {
  const Eigen::VectorXd grid = default_grid(6, 0.05);
  Eigen::VectorXd probs(6);
  probs << 0.0, 0.0, 1.0, 1.0, 0.0, 1.0;
  const auto records = records_from_probs(grid, probs, 10.0, 1000);
  CHECK_THROWS_AS(
      njcm::fit_parity_polynomial(records, FitBasis{Parity::Even, 2}, 0.0),
      DegenerateWeights);
}

TEST_CASE("extractors enforce the fit provenance") {
  ModelParams params;
  const FitResult odd = handmade_fit(Parity::Odd, 0.5, 2.0, 0.04);
  const EnergyEstimate est = njcm::extract_hamiltonian(odd, params);
  CHECK(est.value == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(est.standard_error == doctest::Approx(0.04).epsilon(1e-15));

  ModelParams flipped = params;
  flipped.detuning = -params.detuning;
  const EnergyEstimate neg = njcm::extract_hamiltonian(odd, flipped);
  CHECK(neg.value == doctest::Approx(-0.4).epsilon(1e-15));
  CHECK(neg.standard_error == doctest::Approx(0.04).epsilon(1e-15));

  CHECK_THROWS_AS(
      njcm::extract_hamiltonian(handmade_fit(Parity::Even, 0.0, 2.0, 0.04),
                                params),
      WrongBasis);
  CHECK_THROWS_AS(
      njcm::extract_hamiltonian(handmade_fit(Parity::Odd, 0.0, 2.0, 0.04),
                                params),
      WrongBasis);
  CHECK_THROWS_AS(
      njcm::extract_commutator(handmade_fit(Parity::Odd, 0.5, 2.0, 0.04),
                               params),
      WrongBasis);
  const FitResult even = handmade_fit(Parity::Even, 0.0, 3.0, 0.01);
  CHECK(njcm::extract_commutator(even, params).value ==
        doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("noiseless coupling sweep recovers the Hamiltonian expectation") {
  ModelParams p;
  p.fock_cutoff = 4;
  const auto e = ElectronicAmplitudes::superposition();
  const double t = 10.0;
  const Eigen::VectorXd grid = default_grid(20, 0.05);
  const Eigen::VectorXd probs = njcm::sigma22_series(p, e, Fock{0}, t, grid);
  const auto records = records_from_probs(grid, probs, t, 1000000);
  const FitResult fit =
      njcm::fit_parity_polynomial(records, FitBasis{Parity::Odd, 5}, 0.5);
  const EnergyEstimate est = njcm::extract_hamiltonian(fit, p);
  const double truth = njcm::h_expectation_fock(p, e, 0, t);
  // The residual gap is the small-coupling truncation of the grid itself.
  CHECK(std::abs(est.value - truth) / std::abs(truth) < 2e-4);
}

TEST_CASE("noiseless coupling sweep recovers the commutator") {
  ModelParams p;
  p.sideband_order = 2;
  const Complex alpha0{std::sqrt(12.0), 0.0};
  p.fock_cutoff = njcm::coherent_cutoff(alpha0);
  const auto e = ElectronicAmplitudes::ground();
  const double t = 40.0;
  const Eigen::VectorXd grid = default_grid(20, 0.05);
  const Eigen::VectorXd probs =
      njcm::sigma22_series(p, e, Coherent{alpha0}, t, grid);
  const auto records = records_from_probs(grid, probs, t, 1000000);
  const FitResult fit =
      njcm::fit_parity_polynomial(records, FitBasis{Parity::Even, 6}, 0.0);
  const EnergyEstimate est = njcm::extract_commutator(fit, p);
  const double truth = njcm::commutator_expectation(p, alpha0, t);
  CHECK(std::abs(est.value - truth) / std::abs(truth) < 1e-5);
}

TEST_CASE("fixed-weight solution is exactly linear in the data") {
  const Eigen::VectorXd grid = default_grid(5, 0.05);
  Eigen::VectorXd probs(5);
  for (Eigen::Index i = 0; i < 5; ++i)
    probs(i) = 0.5 + static_cast<double>(i - 2) * 0x1.0p-13;
  const auto base = records_from_probs(grid, probs, 10.0, 8192);
  const Eigen::VectorXd weights = Eigen::VectorXd::Ones(5);
  const FitBasis basis{Parity::Odd, 3};
  const FitResult fit =
      njcm::fit_parity_polynomial_weighted(base, basis, 0.5, weights);

  const double lambda = 1024.0;  // power of two: exact scaling
  Eigen::VectorXd scaled_probs(5);
  for (Eigen::Index i = 0; i < 5; ++i)
    scaled_probs(i) = 0.5 + lambda * (probs(i) - 0.5);
  const auto scaled = records_from_probs(grid, scaled_probs, 10.0, 8192);
  const FitResult fit2 =
      njcm::fit_parity_polynomial_weighted(scaled, basis, 0.5, weights);

  REQUIRE(fit2.coefficients.size() == fit.coefficients.size());
  for (Eigen::Index j = 0; j < fit.coefficients.size(); ++j)
    CHECK(fit2.coefficients(j) == lambda * fit.coefficients(j));
}

TEST_CASE("weighted overload validates its weights") {
  const Eigen::VectorXd grid = default_grid(5, 0.05);
  const Eigen::VectorXd probs = Eigen::VectorXd::Constant(5, 0.5);
  const auto records = records_from_probs(grid, probs, 10.0, 100);
  CHECK_THROWS_AS(
      njcm::fit_parity_polynomial_weighted(records, FitBasis{Parity::Odd, 3},
                                           0.5, Eigen::VectorXd::Ones(4)),
      std::invalid_argument);
  Eigen::VectorXd bad = Eigen::VectorXd::Ones(5);
  bad(3) = 0.0;
  CHECK_THROWS_AS(
      njcm::fit_parity_polynomial_weighted(records, FitBasis{Parity::Odd, 3},
                                           0.5, bad),
      std::invalid_argument);
}

TEST_CASE("estimator bias shrinks like 1/shots") {
  // Shot-noise consistency: the weighted fit uses estimated weights, whose
  // correlation with the residuals induces an O(1/shots) bias. Measure the
  // mean extracted value at four shot counts against the infinite-shot
  // anchor (the noiseless fit on the same grid) and require the bias to
  // regress on 1/shots through the origin with R^2 > 0.9.
  ModelParams p;
  p.fock_cutoff = 4;
  const auto e = ElectronicAmplitudes::superposition();
  const double t = 10.0;
  const Eigen::VectorXd grid = default_grid(10, 0.05);
  const FitBasis basis{Parity::Odd, 5};

  const Eigen::VectorXd probs = njcm::sigma22_series(p, e, Fock{0}, t, grid);
  const auto noiseless = records_from_probs(grid, probs, t, 1000000);
  const double anchor =
      njcm::extract_hamiltonian(
          njcm::fit_parity_polynomial(noiseless, basis, 0.5), p)
          .value;

  const long long shots_levels[] = {100, 1000, 10000, 100000};
  const int reps_levels[] = {200000, 50000, 8000, 800};
  double xs[4];
  double ys[4];
  for (int level = 0; level < 4; ++level) {
    const long long shots = shots_levels[level];
    const int reps = reps_levels[level];
    double sum = 0.0;
    for (int r = 0; r < reps; ++r) {
      const auto records = njcm::sample_sigma22(
          p, e, Fock{0}, t, grid, shots,
          SeedSpec{777, static_cast<std::uint64_t>(r)});
      const FitResult fit = njcm::fit_parity_polynomial(records, basis, 0.5);
      sum += njcm::extract_hamiltonian(fit, p).value;
    }
    xs[level] = 1.0 / static_cast<double>(shots);
    ys[level] = sum / reps - anchor;
  }

  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (int level = 0; level < 4; ++level) {
    sxy += xs[level] * ys[level];
    sxx += xs[level] * xs[level];
    syy += ys[level] * ys[level];
  }
  const double slope = sxy / sxx;
  double ss_res = 0.0;
  for (int level = 0; level < 4; ++level) {
    const double r = ys[level] - slope * xs[level];
    ss_res += r * r;
  }
  const double r2 = 1.0 - ss_res / syy;
  INFO("bias(100) = " << ys[0] << ", bias(1e5) = " << ys[3]
                      << ", slope = " << slope << ", R^2 = " << r2);
  CHECK(r2 > 0.9);
  CHECK(std::abs(ys[3]) < std::abs(ys[0]));
}

}  // TEST_SUITE("estimation")
