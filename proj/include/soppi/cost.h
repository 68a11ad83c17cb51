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

#ifndef SOPPI_COST_H_
#define SOPPI_COST_H_

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "soppi/types.h"

namespace soppi {

// Quadratic running/terminal weights with an optional reference control
// sequence. Errors on angle_dims are wrapped to (-pi, pi].
struct CostSpec {
  Eigen::MatrixXd Q;        // n x n running state weight
  Eigen::MatrixXd R;        // m x m control weight
  Eigen::MatrixXd Q_T;      // n x n terminal weight
  State x_target;           // n
  std::optional<ControlSequence> u_ref;  // horizon x m
  std::vector<int> angle_dims;

  int StateDim() const { return static_cast<int>(Q.rows()); }
  int ControlDim() const { return static_cast<int>(R.rows()); }

  // Checks shapes, symmetry and positive semidefiniteness of the weights.
  // If `horizon` is given, u_ref must have exactly that many rows.
  void Validate(std::optional<int> horizon = std::nullopt) const;
};

// A spec with every weight zero.
CostSpec ZeroCost(int state_dim, int control_dim);

State StateError(const CostSpec& spec, const State& state);
Control ControlError(const CostSpec& spec, const Control& control, int t);

// e_x' Q e_x + e_u' R e_u.
double RunningCost(const CostSpec& spec, const State& state,
                   const Control& control, int t);
// e_x' Q_T e_x.
double TerminalCost(const CostSpec& spec, const State& state);

// terminal(states[N]) + sum_{t<N} running(states[t], controls[t], t).
double CostToGo(const CostSpec& spec, const StateTrajectory& states,
                const ControlSequence& controls);

struct CostGradients {
  State d_cost_d_state;
  Control d_cost_d_control;
};

// (2 Q e_x, 2 R e_u); wrapping is treated as locally the identity.
CostGradients RunningCostGradients(const CostSpec& spec, const State& state,
                                   const Control& control, int t);

// Unchecked, allocation-free kernels behind the functions above, for use in
// per-sample loops. Sizes must match the spec; gradient outputs are
// overwritten.
double RunningCostRaw(const CostSpec& spec, std::span<const double> state,
                      std::span<const double> control, int t);
double TerminalCostRaw(const CostSpec& spec, std::span<const double> state);
void RunningCostGradientsRaw(const CostSpec& spec,
                             std::span<const double> state,
                             std::span<const double> control, int t,
                             std::span<double> d_cost_d_state,
                             std::span<double> d_cost_d_control);

}  // namespace soppi

#endif  // SOPPI_COST_H_
