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

#include "njcm/estimation.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace njcm {

std::vector<int> FitBasis::powers() const {
  std::vector<int> out;
  const int first = parity == Parity::Odd ? 1 : 2;
  for (int p = first; p <= max_power; p += 2) out.push_back(p);
  return out;
}

void FitBasis::validate() const {
  const bool odd = parity == Parity::Odd;
  if (max_power < (odd ? 1 : 2))
    throw ConfigError("max_power too small for the basis");
  if ((max_power % 2 == 0) == odd)
    throw ConfigError("max_power " + std::to_string(max_power) +
                      " does not respect the " +
                      (odd ? std::string("odd") : std::string("even")) +
                      " parity");
}

namespace {

FitResult solve_weighted(const std::vector<MeasurementRecord>& records,
                         const FitBasis& basis, double offset,
                         const Eigen::VectorXd& weights) {
  basis.validate();
  const auto powers = basis.powers();
  const int q = static_cast<int>(powers.size());
  const int m = static_cast<int>(records.size());

  std::set<double> distinct;
  for (const auto& r : records) {
    if (r.shots < 1) throw std::invalid_argument("record with shots < 1");
    if (!(r.p_hat >= 0.0 && r.p_hat <= 1.0) || !std::isfinite(r.g))
      throw std::invalid_argument("record with invalid p_hat or g");
    distinct.insert(r.g);
  }
  if (static_cast<int>(distinct.size()) < q)
    throw SingularDesign("only " + std::to_string(distinct.size()) +
                         " distinct g values for a basis of size " +
                         std::to_string(q));

  Eigen::MatrixXd design(m, q);
  Eigen::VectorXd rhs(m);
  for (int i = 0; i < m; ++i) {
    const double sw = std::sqrt(weights(i));
    for (int j = 0; j < q; ++j)
      design(i, j) = sw * std::pow(records[i].g, powers[j]);
    rhs(i) = sw * (records[i].p_hat - offset);
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double smin = sv(q - 1);
  const double cond = smin > 0.0 ? sv(0) / smin
                                 : std::numeric_limits<double>::infinity();
  if (!(cond <= 1e12))
    throw SingularDesign("weighted design condition number " +
                         std::to_string(cond) + " exceeds 1e12");

  FitResult fit;
  fit.coefficients = svd.solve(rhs);
  const Eigen::VectorXd inv_s2 = sv.array().square().inverse();
  fit.covariance =
      svd.matrixV() * inv_s2.asDiagonal() * svd.matrixV().transpose();
  double ss = 0.0;
  for (int i = 0; i < m; ++i) {
    double model = 0.0;
    for (int j = 0; j < q; ++j)
      model += fit.coefficients(j) * std::pow(records[i].g, powers[j]);
    const double res = records[i].p_hat - offset - model;
    ss += res * res;
  }
  fit.residual_rms = std::sqrt(ss / m);
  fit.condition_number = cond;
  fit.parity = basis.parity;
  fit.max_power = basis.max_power;
  fit.offset = offset;
  return fit;
}

}  // namespace

FitResult fit_parity_polynomial(const std::vector<MeasurementRecord>& records,
                                const FitBasis& basis, double offset) {
  if (records.empty()) throw std::invalid_argument("no records to fit");
  bool any_interior = false;
  Eigen::VectorXd weights(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.shots < 1) throw std::invalid_argument("record with shots < 1");
    if (r.p_hat != 0.0 && r.p_hat != 1.0) any_interior = true;
    const double lo = 1.0 / (2.0 * static_cast<double>(r.shots));
    const double pt = std::clamp(r.p_hat, lo, 1.0 - lo);
    weights(static_cast<Eigen::Index>(i)) =
        static_cast<double>(r.shots) / (pt * (1.0 - pt));
  }
  if (!any_interior)
    throw DegenerateWeights(
        "every record sits at p_hat 0 or 1; the weighted fit is meaningless");
  return solve_weighted(records, basis, offset, weights);
}

FitResult fit_parity_polynomial_weighted(
    const std::vector<MeasurementRecord>& records, const FitBasis& basis,
    double offset, const Eigen::VectorXd& weights) {
  if (records.empty()) throw std::invalid_argument("no records to fit");
  if (weights.size() != static_cast<Eigen::Index>(records.size()))
    throw std::invalid_argument("one weight per record required");
  if (!(weights.minCoeff() > 0.0))
    throw std::invalid_argument("weights must be positive");
  return solve_weighted(records, basis, offset, weights);
}

namespace {

EnergyEstimate scale_leading(const FitResult& fit, const ModelParams& params) {
  EnergyEstimate out;
  out.value = params.detuning * fit.coefficients(0);
  out.standard_error =
      std::abs(params.detuning) * std::sqrt(fit.covariance(0, 0));
  return out;
}

}  // namespace

EnergyEstimate extract_hamiltonian(const FitResult& fit,
                                   const ModelParams& params) {
  if (fit.parity != Parity::Odd || fit.offset != 0.5)
    throw WrongBasis(
        "extract_hamiltonian requires an Odd-parity fit with offset 1/2");
  return scale_leading(fit, params);
}

EnergyEstimate extract_commutator(const FitResult& fit,
                                  const ModelParams& params) {
  if (fit.parity != Parity::Even || fit.offset != 0.0)
    throw WrongBasis(
        "extract_commutator requires an Even-parity fit with offset 0");
  return scale_leading(fit, params);
}

}  // namespace njcm
