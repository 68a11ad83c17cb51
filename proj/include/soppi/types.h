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

#ifndef SOPPI_TYPES_H_
#define SOPPI_TYPES_H_

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace soppi {

// x_t. Dimension is fixed per system.
using State = Eigen::VectorXd;
// u_t (nominal) or v_t (sampled). Dimension is fixed per system.
using Control = Eigen::VectorXd;

// N x m, row t holds the control applied at step t.
using ControlSequence = Eigen::MatrixXd;
// (N + 1) x n, row t holds x_t.
using StateTrajectory = Eigen::MatrixXd;

// Thrown for malformed inputs: dimension mismatch, non-finite values, bad
// configuration.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Wraps an angle to (-pi, pi].
inline double WrapAngle(double angle) {
  double wrapped = std::remainder(angle, 2.0 * std::numbers::pi);
  if (wrapped <= -std::numbers::pi) wrapped += 2.0 * std::numbers::pi;
  return wrapped;
}

template <typename Derived>
bool AllFinite(const Eigen::DenseBase<Derived>& values) {
  return values.derived().array().isFinite().all();
}

// Views over contiguous Eigen vectors for the span-based kernels.
inline std::span<const double> ConstSpan(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<size_t>(v.size())};
}
inline std::span<double> MutableSpan(Eigen::VectorXd& v) {
  return {v.data(), static_cast<size_t>(v.size())};
}

}  // namespace soppi

#endif  // SOPPI_TYPES_H_
