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

// Parity-constrained polynomial regression in the coupling scale g. The odd
// fit of sigma22 - 1/2 extracts the Hamiltonian term c1; the even fit of
// sigma22 extracts the commutator term c2. Physical quantities are quoted
// at the g = 1 convention (|kappa| = kappa').

#ifndef NJCM_ESTIMATION_HPP
#define NJCM_ESTIMATION_HPP

#include <Eigen/Core>
#include <vector>

#include "njcm/model.hpp"
#include "njcm/sampling.hpp"

namespace njcm {

enum class Parity { Odd, Even };

struct FitBasis {
  Parity parity = Parity::Odd;
  int max_power = 5;

  // {g, g^3, ...} or {g^2, g^4, ...} up to max_power.
  std::vector<int> powers() const;
  int size() const { return static_cast<int>(powers().size()); }
  // Throws ConfigError unless max_power matches the parity and is >= the
  // lowest parity power.
  void validate() const;
};

struct FitResult {
  Eigen::VectorXd coefficients;  // ordered by ascending power
  Eigen::MatrixXd covariance;
  double residual_rms = 0.0;
  double condition_number = 0.0;
  // Provenance, so extractors can reject fits of the wrong kind.
  Parity parity = Parity::Odd;
  int max_power = 0;
  double offset = 0.0;
};

struct EnergyEstimate {
  double value = 0.0;           // units of hbar*kappa'
  double standard_error = 0.0;  // same units
};

// Weighted linear least squares of (p_hat - offset) on the parity basis.
// Weights are shots / (p~ (1 - p~)) with p~ clamped to
// [1/(2 shots), 1 - 1/(2 shots)]. Throws SingularDesign if the distinct-g
// count is below the basis size or the weighted design has condition
// number > 1e12, DegenerateWeights if every record has p_hat in {0, 1}.
FitResult fit_parity_polynomial(const std::vector<MeasurementRecord>& records,
                                const FitBasis& basis, double offset);

// Same solver with caller-supplied positive weights (one per record).
FitResult fit_parity_polynomial_weighted(
    const std::vector<MeasurementRecord>& records, const FitBasis& basis,
    double offset, const Eigen::VectorXd& weights);

// hbar dw c1 with standard error hbar |dw| sqrt(cov_11). Requires an Odd
// fit with offset 1/2 (WrongBasis otherwise).
EnergyEstimate extract_hamiltonian(const FitResult& fit,
                                   const ModelParams& params);

// hbar dw c2 with standard error hbar |dw| sqrt(cov at the c2 entry).
// Requires an Even fit with offset 0 (WrongBasis otherwise).
EnergyEstimate extract_commutator(const FitResult& fit,
                                  const ModelParams& params);

}  // namespace njcm

#endif  // NJCM_ESTIMATION_HPP
