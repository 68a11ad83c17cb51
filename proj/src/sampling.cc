// Copyright 2026 The SOPPI Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "soppi/sampling.h"

#include <cmath>
#include <numbers>
#include <string>

#include "soppi/thread_pool.h"

namespace soppi {
namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85;

inline void MulHiLo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
  const uint64_t product = static_cast<uint64_t>(a) * b;
  hi = static_cast<uint32_t>(product >> 32);
  lo = static_cast<uint32_t>(product);
}

// Uniform in (0, 1] from the top 53 bits.
inline double ToUnitInterval(uint32_t hi, uint32_t lo) {
  const uint64_t bits = (static_cast<uint64_t>(hi) << 32) | lo;
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

std::array<uint32_t, 4> Philox4x32(std::array<uint32_t, 4> counter,
                                   std::array<uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    uint32_t hi0, lo0, hi1, lo1;
    MulHiLo(kPhiloxM0, counter[0], hi0, lo0);
    MulHiLo(kPhiloxM1, counter[2], hi1, lo1);
    counter = {hi1 ^ counter[1] ^ key[0], lo1, hi0 ^ counter[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return counter;
}

double CounterGaussian(uint64_t seed, std::array<uint32_t, 4> counter) {
  const std::array<uint32_t, 2> key = {static_cast<uint32_t>(seed),
                                       static_cast<uint32_t>(seed >> 32)};
  const std::array<uint32_t, 4> bits = Philox4x32(counter, key);
  const double u1 = ToUnitInterval(bits[0], bits[1]);
  const double u2 = ToUnitInterval(bits[2], bits[3]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

NoiseTensor DrawNoise(uint64_t seed, int num_samples, int horizon,
                      int control_dim, const Eigen::VectorXd& sigma,
                      uint64_t stream, ThreadPool* pool) {
  if (num_samples < 1 || horizon < 1 || control_dim < 1) {
    throw InvalidArgument("draw_noise: K, N and m must be >= 1");
  }
  if (sigma.size() != control_dim) {
    throw InvalidArgument("draw_noise: sigma has " +
                          std::to_string(sigma.size()) + " entries, expected " +
                          std::to_string(control_dim));
  }
  for (Eigen::Index j = 0; j < sigma.size(); ++j) {
    if (!(sigma[j] > 0.0) || !std::isfinite(sigma[j])) {
      throw InvalidArgument("draw_noise: sigma must be positive and finite");
    }
  }
  if (stream > UINT32_MAX) {
    throw InvalidArgument("draw_noise: stream must fit in 32 bits");
  }

  NoiseTensor noise;
  noise.seed = seed;
  noise.stream = stream;
  noise.sigma = sigma;
  noise.samples.assign(num_samples, ControlSequence(horizon, control_dim));
  ParallelFor(pool, num_samples, [&](int k) {
    ControlSequence& sample = noise.samples[k];
    for (int t = 0; t < horizon; ++t) {
      for (int j = 0; j < control_dim; ++j) {
        const std::array<uint32_t, 4> counter = {
            static_cast<uint32_t>(k), static_cast<uint32_t>(t),
            static_cast<uint32_t>(j), static_cast<uint32_t>(stream)};
        sample(t, j) = sigma[j] * CounterGaussian(seed, counter);
      }
    }
  });
  return noise;
}

SampleBatch Perturb(const ControlSequence& base, const NoiseTensor& noise) {
  if (noise.samples.empty()) throw InvalidArgument("perturb: empty noise");
  if (base.rows() != noise.horizon() || base.cols() != noise.control_dim()) {
    throw InvalidArgument("perturb: base is " + std::to_string(base.rows()) +
                          "x" + std::to_string(base.cols()) + ", noise is " +
                          std::to_string(noise.horizon()) + "x" +
                          std::to_string(noise.control_dim()));
  }
  SampleBatch batch{base, noise, {}};
  batch.controls.reserve(noise.samples.size());
  for (const ControlSequence& eps : noise.samples) {
    batch.controls.push_back(base + eps);
  }
  return batch;
}

}  // namespace soppi
