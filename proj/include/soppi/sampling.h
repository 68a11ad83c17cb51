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

#ifndef SOPPI_SAMPLING_H_
#define SOPPI_SAMPLING_H_

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "soppi/types.h"

namespace soppi {

class ThreadPool;

// Philox4x32-10 (Salmon et al., SC'11). Stateless: a 128-bit counter and a
// 64-bit key map to 128 random bits.
std::array<uint32_t, 4> Philox4x32(std::array<uint32_t, 4> counter,
                                   std::array<uint32_t, 2> key);

// Standard normal for one (key, counter) pair: Box-Muller (cosine branch) on
// the two 53-bit uniforms extracted from a single Philox block.
double CounterGaussian(uint64_t seed, std::array<uint32_t, 4> counter);

// K x N x m zero-mean Gaussian perturbations. Entry (k, t, j) is a pure
// function of (seed, stream, k, t, j) and sigma[j].
struct NoiseTensor {
  uint64_t seed = 0;
  uint64_t stream = 0;
  Eigen::VectorXd sigma;
  std::vector<ControlSequence> samples;  // K entries, each N x m

  int num_samples() const { return static_cast<int>(samples.size()); }
  int horizon() const { return samples.empty() ? 0 : samples[0].rows(); }
  int control_dim() const { return static_cast<int>(sigma.size()); }
};

// `stream` distinguishes draws sharing a seed (e.g. successive controller
// steps). Throws InvalidArgument for non-positive sizes or sigma.
NoiseTensor DrawNoise(uint64_t seed, int num_samples, int horizon,
                      int control_dim, const Eigen::VectorXd& sigma,
                      uint64_t stream = 0, ThreadPool* pool = nullptr);

// v = U_init + eps. After refinement `noise.samples` is kept equal to
// controls - base by whoever edits `controls`.
struct SampleBatch {
  ControlSequence base;
  NoiseTensor noise;
  std::vector<ControlSequence> controls;

  int num_samples() const { return static_cast<int>(controls.size()); }
  int horizon() const { return static_cast<int>(base.rows()); }
};

SampleBatch Perturb(const ControlSequence& base, const NoiseTensor& noise);

}  // namespace soppi

#endif  // SOPPI_SAMPLING_H_
