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

// Synthetic shot-noise measurement records of sigma22. Every record owns an
// independent substream derived from (master_seed, point_index, replicate),
// so generation order and thread count never change the output. The
// binomial draw is a plain Bernoulli count on top of mt19937_64 with
// (x >> 11) * 2^-53 uniforms: bit-portable across standard libraries, which
// std::binomial_distribution is not.

#ifndef NJCM_SAMPLING_HPP
#define NJCM_SAMPLING_HPP

#include <Eigen/Core>
#include <cstdint>
#include <random>
#include <vector>

#include "njcm/model.hpp"

namespace njcm {

struct MeasurementRecord {
  double g = 0.0;
  double t = 0.0;         // units of 1/kappa'
  long long shots = 0;
  long long successes = 0;
  double p_hat = 0.0;     // successes / shots
};

struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t replicate = 0;
};

// splitmix64 finalizer; the substream chain hashes the seed, point index
// and replicate index through it.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t substream_seed(const SeedSpec& seed, std::uint64_t point_index);

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform53(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

// Number of successes out of `shots` Bernoulli trials at probability p.
long long binomial_count(std::mt19937_64& engine, long long shots, double p);

// One record per g grid entry: p = sigma22_exact(g), successes drawn from
// the record's substream (point_index = point_offset + grid position).
// Sweeps over several cells (Fock states, times, sidebands) pass a distinct
// point_offset per cell to keep every substream unique.
std::vector<MeasurementRecord> sample_sigma22(
    const ModelParams& params, const ElectronicAmplitudes& electronic,
    const MotionalSpec& motional, double t, const Eigen::VectorXd& g_grid,
    long long shots_per_point, const SeedSpec& seed,
    std::uint64_t point_offset = 0);

}  // namespace njcm

#endif  // NJCM_SAMPLING_HPP
