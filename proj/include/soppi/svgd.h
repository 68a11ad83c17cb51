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

#ifndef SOPPI_SVGD_H_
#define SOPPI_SVGD_H_

#include <Eigen/Core>

namespace soppi {

class ThreadPool;

enum class BandwidthMode {
  kFixed,   // use SvgdConfig::bandwidth
  kMedian,  // sigma_k^2 = median(pairwise squared distance) / (2 log K)
};

struct SvgdConfig {
  // Particle step size: v <- v + step_size * phi(v).
  double step_size = 0.05;
  // SVGD iterations per horizon step. Zero disables refinement.
  int iterations = 100;
  BandwidthMode bandwidth_mode = BandwidthMode::kFixed;
  // Kernel length scale sigma_k (also the fallback for the median mode when
  // it degenerates: K < 2 or all particles coincident).
  double bandwidth = 1.0;
  // Cost-likelihood temperature: log p(v) = -alpha * L(v) + const.
  double alpha = 1.0;
  // exp(-|a-b|^2 / 2s^2) when true; exp(-|a-b| / 2s^2) otherwise.
  bool squared_norm = true;
  // Caps the per-particle norm of phi when > 0.
  double gradient_clip = 0.0;

  void Validate() const;
};

// One timestep's particles (K x m) and the cost gradients at them (K x m).
struct ParticleSet {
  Eigen::MatrixXd particles;
  Eigen::MatrixXd grads;
};

double Kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
              double bandwidth, bool squared_norm = true);

// Gradient of Kernel(a, b) with respect to a. In the unsquared mode the
// kernel has a cusp at a == b; zero is returned there and a warning logged
// once per process.
Eigen::VectorXd KernelGradWrtFirst(const Eigen::VectorXd& a,
                                   const Eigen::VectorXd& b, double bandwidth,
                                   bool squared_norm = true);

// sigma_k used by SteinDirection for this particle set.
double ResolveBandwidth(const Eigen::MatrixXd& particles,
                        const SvgdConfig& config);

// phi(v_i) = 1/K sum_j [ k(v_j, v_i) (-alpha grads_j) + grad_{v_j} k(v_j, v_i) ]
// for every particle i, returned as K x m. Each kernel value is computed once
// per pair; the summation order is fixed, so the result does not depend on
// the thread pool.
Eigen::MatrixXd SteinDirection(const ParticleSet& set, const SvgdConfig& config,
                               ThreadPool* pool = nullptr);

// Returns a copy of `set` with particles moved by step_size * direction.
// Gradients are carried over unchanged (they are stale until recomputed).
ParticleSet ApplyUpdate(const ParticleSet& set,
                        const Eigen::MatrixXd& direction, double step_size);

}  // namespace soppi

#endif  // SOPPI_SVGD_H_
