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

#include "soppi/cost.h"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace soppi {
namespace {

void CheckWeight(const Eigen::MatrixXd& w, int dim, const char* name) {
  if (w.rows() != dim || w.cols() != dim) {
    throw InvalidArgument(std::string("cost: ") + name + " must be " +
                          std::to_string(dim) + "x" + std::to_string(dim));
  }
  if (!AllFinite(w)) {
    throw InvalidArgument(std::string("cost: ") + name + " is not finite");
  }
  const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
  if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidArgument(std::string("cost: ") + name + " is not symmetric");
  }
  if (dim == 0) return;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10 * scale) {
    throw InvalidArgument(std::string("cost: ") + name +
                          " is not positive semidefinite");
  }
}

void CheckState(const CostSpec& spec, const State& state) {
  if (state.size() != spec.StateDim()) {
    throw InvalidArgument("cost: state has dimension " +
                          std::to_string(state.size()) + ", expected " +
                          std::to_string(spec.StateDim()));
  }
}

void CheckControl(const CostSpec& spec, const Control& control, int t) {
  if (control.size() != spec.ControlDim()) {
    throw InvalidArgument("cost: control has dimension " +
                          std::to_string(control.size()) + ", expected " +
                          std::to_string(spec.ControlDim()));
  }
  if (spec.u_ref && (t < 0 || t >= spec.u_ref->rows())) {
    throw InvalidArgument("cost: step " + std::to_string(t) +
                          " outside the reference sequence");
  }
}

// Error vectors live on the stack; dimensions beyond this fall back to the
// heap.
using ErrorBuffer = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 32, 1>;

void FillStateError(const CostSpec& spec, std::span<const double> state,
                    ErrorBuffer& e) {
  const int n = spec.StateDim();
  e.resize(n);
  for (int i = 0; i < n; ++i) e[i] = state[i] - spec.x_target[i];
  for (int d : spec.angle_dims) e[d] = WrapAngle(e[d]);
}

void FillControlError(const CostSpec& spec, std::span<const double> control,
                      int t, ErrorBuffer& e) {
  const int m = spec.ControlDim();
  e.resize(m);
  for (int j = 0; j < m; ++j) {
    e[j] = spec.u_ref ? control[j] - (*spec.u_ref)(t, j) : control[j];
  }
}

double QuadraticForm(const Eigen::MatrixXd& w, const ErrorBuffer& e) {
  double total = 0.0;
  for (Eigen::Index c = 0; c < e.size(); ++c) {
    double column = 0.0;
    for (Eigen::Index r = 0; r < e.size(); ++r) column += w(r, c) * e[r];
    total += column * e[c];
  }
  return total;
}

void TwiceProduct(const Eigen::MatrixXd& w, const ErrorBuffer& e,
                  std::span<double> out) {
  for (Eigen::Index r = 0; r < e.size(); ++r) {
    double row = 0.0;
    for (Eigen::Index c = 0; c < e.size(); ++c) row += w(r, c) * e[c];
    out[r] = 2.0 * row;
  }
}

}  // namespace

void CostSpec::Validate(std::optional<int> horizon) const {
  const int n = StateDim();
  const int m = ControlDim();
  CheckWeight(Q, n, "Q");
  CheckWeight(R, m, "R");
  CheckWeight(Q_T, n, "Q_T");
  if (x_target.size() != n || !AllFinite(x_target)) {
    throw InvalidArgument("cost: x_target must be a finite vector of size " +
                          std::to_string(n));
  }
  for (int d : angle_dims) {
    if (d < 0 || d >= n) {
      throw InvalidArgument("cost: angle dim " + std::to_string(d) +
                            " out of range");
    }
  }
  if (u_ref) {
    if (u_ref->cols() != m || !AllFinite(*u_ref)) {
      throw InvalidArgument("cost: u_ref must be finite with " +
                            std::to_string(m) + " columns");
    }
    if (horizon && u_ref->rows() != *horizon) {
      throw InvalidArgument("cost: u_ref has " +
                            std::to_string(u_ref->rows()) +
                            " rows, horizon is " + std::to_string(*horizon));
    }
  }
}

CostSpec ZeroCost(int state_dim, int control_dim) {
  return CostSpec{Eigen::MatrixXd::Zero(state_dim, state_dim),
                  Eigen::MatrixXd::Zero(control_dim, control_dim),
                  Eigen::MatrixXd::Zero(state_dim, state_dim),
                  State::Zero(state_dim),
                  std::nullopt,
                  {}};
}

State StateError(const CostSpec& spec, const State& state) {
  CheckState(spec, state);
  State error = state - spec.x_target;
  for (int d : spec.angle_dims) error[d] = WrapAngle(error[d]);
  return error;
}

Control ControlError(const CostSpec& spec, const Control& control, int t) {
  CheckControl(spec, control, t);
  if (!spec.u_ref) return control;
  return control - spec.u_ref->row(t).transpose();
}

double RunningCost(const CostSpec& spec, const State& state,
                   const Control& control, int t) {
  CheckState(spec, state);
  CheckControl(spec, control, t);
  return RunningCostRaw(spec, ConstSpan(state), ConstSpan(control), t);
}

double TerminalCost(const CostSpec& spec, const State& state) {
  CheckState(spec, state);
  return TerminalCostRaw(spec, ConstSpan(state));
}

double CostToGo(const CostSpec& spec, const StateTrajectory& states,
                const ControlSequence& controls) {
  const Eigen::Index horizon = controls.rows();
  if (states.rows() != horizon + 1) {
    throw InvalidArgument("cost_to_go: " + std::to_string(states.rows()) +
                          " states for " + std::to_string(horizon) +
                          " controls");
  }
  double total = 0.0;
  for (Eigen::Index t = 0; t < horizon; ++t) {
    total += RunningCost(spec, states.row(t).transpose(),
                         controls.row(t).transpose(), static_cast<int>(t));
  }
  return total + TerminalCost(spec, states.row(horizon).transpose());
}

CostGradients RunningCostGradients(const CostSpec& spec, const State& state,
                                   const Control& control, int t) {
  CheckState(spec, state);
  CheckControl(spec, control, t);
  CostGradients grads{State(spec.StateDim()), Control(spec.ControlDim())};
  RunningCostGradientsRaw(spec, ConstSpan(state), ConstSpan(control), t,
                          MutableSpan(grads.d_cost_d_state),
                          MutableSpan(grads.d_cost_d_control));
  return grads;
}

double RunningCostRaw(const CostSpec& spec, std::span<const double> state,
                      std::span<const double> control, int t) {
  ErrorBuffer e_x;
  ErrorBuffer e_u;
  FillStateError(spec, state, e_x);
  FillControlError(spec, control, t, e_u);
  return QuadraticForm(spec.Q, e_x) + QuadraticForm(spec.R, e_u);
}

double TerminalCostRaw(const CostSpec& spec, std::span<const double> state) {
  ErrorBuffer e_x;
  FillStateError(spec, state, e_x);
  return QuadraticForm(spec.Q_T, e_x);
}

void RunningCostGradientsRaw(const CostSpec& spec,
                             std::span<const double> state,
                             std::span<const double> control, int t,
                             std::span<double> d_cost_d_state,
                             std::span<double> d_cost_d_control) {
  ErrorBuffer e_x;
  ErrorBuffer e_u;
  FillStateError(spec, state, e_x);
  FillControlError(spec, control, t, e_u);
  TwiceProduct(spec.Q, e_x, d_cost_d_state);
  TwiceProduct(spec.R, e_u, d_cost_d_control);
}

}  // namespace soppi
