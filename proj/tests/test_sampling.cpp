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
#include <set>

#include <doctest.h>

#include "njcm/propagator.hpp"
#include "njcm/sampling.hpp"

namespace {

using njcm::ElectronicAmplitudes;
using njcm::Fock;
using njcm::MeasurementRecord;
using njcm::ModelParams;
using njcm::SeedSpec;

ModelParams fig1_params() {
  ModelParams p;
  p.fock_cutoff = 4;
  return p;
}

Eigen::VectorXd default_grid(int count, double max) {
  Eigen::VectorXd g(count);
  for (int i = 0; i < count; ++i) g(i) = max * (i + 1) / count;
  return g;
}

}  // namespace

TEST_SUITE("sampling") {

TEST_CASE("splitmix64 finalizer frozen values") {
  // First output of the reference splitmix64 stream seeded with 0.
  CHECK(njcm::splitmix64(0) == 0xE220A8397B1DCDAFULL);
  CHECK(njcm::splitmix64(1) == 0x910A2DEC89025CC1ULL);
  CHECK(njcm::splitmix64(0xDEADBEEFULL) == 0x4ADFB90F68C9EB9BULL);
}

TEST_CASE("substream seeds are pairwise distinct") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t master : {0ULL, 7ULL, 123456789ULL}) {
    for (std::uint64_t rep = 0; rep < 8; ++rep) {
      for (std::uint64_t point = 0; point < 64; ++point)
        seen.insert(njcm::substream_seed(SeedSpec{master, rep}, point));
    }
  }
  CHECK(seen.size() == 3 * 8 * 64);
}

TEST_CASE("binomial count edge probabilities") {
  std::mt19937_64 engine(42);
  CHECK(njcm::binomial_count(engine, 1000, 0.0) == 0);
  CHECK(njcm::binomial_count(engine, 1000, 1.0) == 1000);
  CHECK(njcm::binomial_count(engine, 1000, -0.5) == 0);
}

TEST_CASE("binomial count mean is unbiased") {
  std::mt19937_64 engine(7);
  const double p = 0.5;
  const long long shots = 100;
  const int reps = 10000;
  long long total = 0;
  for (int r = 0; r < reps; ++r)
    total += njcm::binomial_count(engine, shots, p);
  const double n = static_cast<double>(shots) * reps;
  const double se = std::sqrt(n * p * (1.0 - p));
  CHECK(std::abs(static_cast<double>(total) - n * p) < 5.0 * se);
}

TEST_CASE("binomial count variance matches shots p (1 - p)") {
  std::mt19937_64 engine(11);
  const double p = 0.3;
  const long long shots = 200;
  const int reps = 10000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int r = 0; r < reps; ++r) {
    const double x =
        static_cast<double>(njcm::binomial_count(engine, shots, p));
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / reps;
  const double var = sum_sq / reps - mean * mean;
  CHECK(var == doctest::Approx(shots * p * (1.0 - p)).epsilon(0.10));
}

TEST_CASE("sample_sigma22 record layout and determinism") {
  const ModelParams p = fig1_params();
  const auto e = ElectronicAmplitudes::superposition();
  const Eigen::VectorXd grid = default_grid(20, 0.05);
  const SeedSpec seed{99, 0};
  const auto a = njcm::sample_sigma22(p, e, Fock{0}, 10.0, grid, 500, seed);
  const auto b = njcm::sample_sigma22(p, e, Fock{0}, 10.0, grid, 500, seed);
  REQUIRE(a.size() == 20);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].g == grid(static_cast<Eigen::Index>(i)));
    CHECK(a[i].t == 10.0);
    CHECK(a[i].shots == 500);
    CHECK(a[i].successes == b[i].successes);
    CHECK(a[i].p_hat ==
          static_cast<double>(a[i].successes) / a[i].shots);
  }
  const auto c =
      njcm::sample_sigma22(p, e, Fock{0}, 10.0, grid, 500, SeedSpec{100, 0});
  bool any_diff = false;
  for (std::size_t i = 0; i < c.size(); ++i)
    any_diff = any_diff || c[i].successes != a[i].successes;
  CHECK(any_diff);
  const auto d =
      njcm::sample_sigma22(p, e, Fock{0}, 10.0, grid, 500, SeedSpec{99, 1});
  any_diff = false;
  for (std::size_t i = 0; i < d.size(); ++i)
    any_diff = any_diff || d[i].successes != a[i].successes;
  CHECK(any_diff);
}

TEST_CASE("point offset reproduces the tail of a longer sweep") {
  const ModelParams p = fig1_params();
  const auto e = ElectronicAmplitudes::superposition();
  const Eigen::VectorXd grid = default_grid(5, 0.05);
  const SeedSpec seed{7, 2};
  const auto whole = njcm::sample_sigma22(p, e, Fock{0}, 10.0, grid, 300, seed);
  const Eigen::VectorXd tail_grid = grid.tail(2);
  const auto tail =
      njcm::sample_sigma22(p, e, Fock{0}, 10.0, tail_grid, 300, seed, 3);
  REQUIRE(tail.size() == 2);
  CHECK(tail[0].successes == whole[3].successes);
  CHECK(tail[1].successes == whole[4].successes);
}

TEST_CASE("sampled frequencies obey the law of large numbers") {
  ModelParams p = fig1_params();
  const auto e = ElectronicAmplitudes::superposition();
  Eigen::VectorXd grid(1);
  grid << 0.05;
  ModelParams at_g = p;
  at_g.coupling_scale = 0.05;
  const double truth = njcm::sigma22_exact(at_g, e, Fock{0}, 10.0);
  const long long shots = 1000;
  const int reps = 10000;
  double sum = 0.0;
  for (int r = 0; r < reps; ++r) {
    const auto rec = njcm::sample_sigma22(
        p, e, Fock{0}, 10.0, grid, shots, SeedSpec{4242, static_cast<std::uint64_t>(r)});
    sum += rec[0].p_hat;
  }
  const double mean = sum / reps;
  const double se = std::sqrt(truth * (1.0 - truth) /
                              (static_cast<double>(shots) * reps));
  CHECK(std::abs(mean - truth) < 4.0 * se);
}

TEST_CASE("sample_sigma22 rejects zero shots") {
  const ModelParams p = fig1_params();
  Eigen::VectorXd grid(1);
  grid << 0.05;
  CHECK_THROWS_AS(
      njcm::sample_sigma22(p, ElectronicAmplitudes::superposition(), Fock{0},
                           10.0, grid, 0, SeedSpec{}),
      std::invalid_argument);
}

}  // TEST_SUITE("sampling")
