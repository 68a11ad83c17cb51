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

#include "soppi/svgd.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "soppi/thread_pool.h"
#include "soppi/types.h"

namespace soppi {
namespace {

void WarnCuspOnce() {
  static std::atomic<bool> warned{false};
  if (!warned.exchange(true)) {
    std::cerr << "soppi: warning: unsquared kernel gradient requested at "
                 "coincident particles; using zero\n";
  }
}

void CheckPair(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
               double bandwidth) {
  if (a.size() != b.size()) {
    throw InvalidArgument("kernel: dimension mismatch " +
                          std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()));
  }
  if (!(bandwidth > 0.0)) throw InvalidArgument("kernel: bandwidth must be > 0");
}

// exp(x) with x clamped at -700 (about 1e-304). Subnormal outputs are a slow
// path on most CPUs and are far below any tolerance.
template <typename Derived>
auto FlushedExp(const Eigen::ArrayBase<Derived>& x) {
  constexpr double kMinExponent = -700.0;
  return x.max(kMinExponent).exp();
}

}  // namespace

void SvgdConfig::Validate() const {
  if (iterations < 0) throw InvalidArgument("svgd: iterations must be >= 0");
  if (iterations > 0 && !(step_size > 0.0)) {
    throw InvalidArgument("svgd: step_size must be > 0 when iterations > 0");
  }
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw InvalidArgument("svgd: bandwidth must be positive and finite");
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgument("svgd: alpha must be positive and finite");
  }
  if (gradient_clip < 0.0) {
    throw InvalidArgument("svgd: gradient_clip must be >= 0");
  }
}

double Kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
              double bandwidth, bool squared_norm) {
  CheckPair(a, b, bandwidth);
  const double dist2 = (a - b).squaredNorm();
  const double d = squared_norm ? dist2 : std::sqrt(dist2);
  return std::exp(-d / (2.0 * bandwidth * bandwidth));
}

Eigen::VectorXd KernelGradWrtFirst(const Eigen::VectorXd& a,
                                   const Eigen::VectorXd& b, double bandwidth,
                                   bool squared_norm) {
  CheckPair(a, b, bandwidth);
  const double two_s2 = 2.0 * bandwidth * bandwidth;
  const Eigen::VectorXd diff = a - b;
  const double dist2 = diff.squaredNorm();
  if (squared_norm) {
    return -(2.0 / two_s2) * std::exp(-dist2 / two_s2) * diff;
  }
  if (dist2 == 0.0) {
    WarnCuspOnce();
    return Eigen::VectorXd::Zero(a.size());
  }
  const double dist = std::sqrt(dist2);
  return -(std::exp(-dist / two_s2) / (two_s2 * dist)) * diff;
}

double ResolveBandwidth(const Eigen::MatrixXd& particles,
                        const SvgdConfig& config) {
  if (config.bandwidth_mode == BandwidthMode::kFixed) return config.bandwidth;
  const Eigen::Index count = particles.rows();
  if (count < 2) return config.bandwidth;
  std::vector<double> dist2;
  dist2.reserve(count * (count - 1) / 2);
  for (Eigen::Index i = 0; i < count; ++i) {
    for (Eigen::Index j = i + 1; j < count; ++j) {
      dist2.push_back((particles.row(i) - particles.row(j)).squaredNorm());
    }
  }
  auto mid = dist2.begin() + dist2.size() / 2;
  std::nth_element(dist2.begin(), mid, dist2.end());
  double median = *mid;
  if (dist2.size() % 2 == 0) {
    median = 0.5 * (median + *std::max_element(dist2.begin(), mid));
  }
  if (!(median > 0.0)) return config.bandwidth;
  return std::sqrt(median / (2.0 * std::log(static_cast<double>(count))));
}

Eigen::MatrixXd SteinDirection(const ParticleSet& set, const SvgdConfig& config,
                               ThreadPool* pool) {
  const Eigen::MatrixXd& v = set.particles;
  const Eigen::MatrixXd& g = set.grads;
  const Eigen::Index count = v.rows();
  const Eigen::Index dim = v.cols();
  if (g.rows() != count || g.cols() != dim) {
    throw InvalidArgument("stein_direction: particles and grads differ in shape");
  }
  for (Eigen::Index j = 0; j < count; ++j) {
    if (!AllFinite(g.row(j))) {
      throw InvalidArgument("stein_direction: non-finite gradient for sample " +
                            std::to_string(j));
    }
    if (!AllFinite(v.row(j))) {
      throw InvalidArgument("stein_direction: non-finite particle " +
                            std::to_string(j));
    }
  }

  const double sigma_k = ResolveBandwidth(v, config);
  const double two_s2 = 2.0 * sigma_k * sigma_k;
  const double inv_count = 1.0 / static_cast<double>(count);
  const int n = static_cast<int>(count);
  const int d = static_cast<int>(dim);

  // Accumulates, for every particle i, sum_j k_ij g_j in columns [0, d) and
  // sum_j s_ij (v_j - v_i) in [d, 2d). Each pair is visited once, from the
  // column of its smaller index. Columns are grouped in fixed chunks whose
  // partial sums are added in chunk order, so the result does not depend on
  // how chunks are spread over threads.
  constexpr int kChunk = 64;
  const int num_chunks = (n + kChunk - 1) / kChunk;
  std::vector<Eigen::MatrixXd> partial(num_chunks);
  std::atomic<bool> cusp{false};
  ParallelFor(pool, num_chunks, [&](int chunk) {
    Eigen::MatrixXd& y = partial[chunk];
    y.setZero(n, 2 * d);
    thread_local Eigen::ArrayXXd diff;
    thread_local Eigen::ArrayXd dist, k, scale, term;
    const int end = std::min(n, (chunk + 1) * kChunk);
    for (int i = chunk * kChunk; i < end; ++i) {
      for (int c = 0; c < d; ++c) y(i, c) += g(i, c);  // k_ii = 1
      const int len = n - i - 1;
      if (len == 0) continue;
      diff.resize(len, d);
      for (int c = 0; c < d; ++c) {
        diff.col(c) = v.col(c).tail(len).array() - v(i, c);
      }
      dist = diff.col(0).square();
      for (int c = 1; c < d; ++c) dist += diff.col(c).square();
      const Eigen::ArrayXd* weight = &k;
      if (config.squared_norm) {
        // s = k * 2 / (2 sigma^2); the constant is applied at the end.
        k = FlushedExp(dist * (-1.0 / two_s2));
      } else {
        dist = dist.sqrt();
        if ((dist == 0.0).any()) cusp = true;
        k = FlushedExp(dist * (-1.0 / two_s2));
        scale = (dist > 0.0).select(k / (two_s2 * dist), 0.0);
        weight = &scale;
      }
      for (int c = 0; c < d; ++c) {
        y(i, c) += (k * g.col(c).tail(len).array()).sum();
        y.col(c).tail(len).array() += g(i, c) * k;
        term = *weight * diff.col(c);
        y(i, d + c) += term.sum();
        y.col(d + c).tail(len).array() -= term;
      }
    }
  });
  Eigen::MatrixXd sums = std::move(partial[0]);
  for (int chunk = 1; chunk < num_chunks; ++chunk) sums += partial[chunk];
  const double s_factor = config.squared_norm ? 2.0 / two_s2 : 1.0;

  // phi_i = (1/K) sum_j [-alpha k_ij g_j - s_ij (v_j - v_i)].
  Eigen::MatrixXd direction(count, dim);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < d; ++c) {
      direction(i, c) =
          (-config.alpha * sums(i, c) - s_factor * sums(i, d + c)) * inv_count;
    }
    if (config.gradient_clip > 0.0) {
      const double norm = direction.row(i).norm();
      if (norm > config.gradient_clip) {
        direction.row(i) *= config.gradient_clip / norm;
      }
    }
  }
  if (cusp) WarnCuspOnce();
  return direction;
}

ParticleSet ApplyUpdate(const ParticleSet& set,
                        const Eigen::MatrixXd& direction, double step_size) {
  if (direction.rows() != set.particles.rows() ||
      direction.cols() != set.particles.cols()) {
    throw InvalidArgument("apply_update: direction shape mismatch");
  }
  return ParticleSet{set.particles + step_size * direction, set.grads};
}

}  // namespace soppi
