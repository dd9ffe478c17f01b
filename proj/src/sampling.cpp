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

#include "njcm/sampling.hpp"

#include <algorithm>

#include "njcm/propagator.hpp"

namespace njcm {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t substream_seed(const SeedSpec& seed, std::uint64_t point_index) {
  std::uint64_t s = splitmix64(seed.master_seed);
  s = splitmix64(s ^ point_index);
  s = splitmix64(s ^ seed.replicate);
  return s;
}

long long binomial_count(std::mt19937_64& engine, long long shots, double p) {
  long long successes = 0;
  for (long long i = 0; i < shots; ++i)
    successes += uniform53(engine) < p ? 1 : 0;
  return successes;
}

std::vector<MeasurementRecord> sample_sigma22(
    const ModelParams& params, const ElectronicAmplitudes& electronic,
    const MotionalSpec& motional, double t, const Eigen::VectorXd& g_grid,
    long long shots_per_point, const SeedSpec& seed,
    std::uint64_t point_offset) {
  if (shots_per_point < 1)
    throw std::invalid_argument("shots_per_point must be >= 1");

  std::vector<MeasurementRecord> records(g_grid.size());
  ModelParams p = params;
  for (Eigen::Index i = 0; i < g_grid.size(); ++i) {
    p.coupling_scale = g_grid(i);
    const double prob =
        std::clamp(sigma22_exact(p, electronic, motional, t), 0.0, 1.0);
    std::mt19937_64 engine(
        substream_seed(seed, point_offset + static_cast<std::uint64_t>(i)));
    MeasurementRecord& rec = records[static_cast<std::size_t>(i)];
    rec.g = g_grid(i);
    rec.t = t;
    rec.shots = shots_per_point;
    rec.successes = binomial_count(engine, shots_per_point, prob);
    rec.p_hat = static_cast<double>(rec.successes) /
                static_cast<double>(rec.shots);
  }
  return records;
}

}  // namespace njcm
