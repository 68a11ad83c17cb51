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

#include "soppi/dynamics.h"

#include <string>

namespace soppi {

void Dynamics::Validate(const State& state, const Control& control) const {
  if (state.size() != StateDim()) {
    throw InvalidArgument(Name() + ": state has dimension " +
                          std::to_string(state.size()) + ", expected " +
                          std::to_string(StateDim()));
  }
  if (control.size() != ControlDim()) {
    throw InvalidArgument(Name() + ": control has dimension " +
                          std::to_string(control.size()) + ", expected " +
                          std::to_string(ControlDim()));
  }
  if (!AllFinite(state)) throw InvalidArgument(Name() + ": non-finite state");
  if (!AllFinite(control)) {
    throw InvalidArgument(Name() + ": non-finite control");
  }
}

State Dynamics::Step(const State& state, const Control& control) const {
  Validate(state, control);
  State next(StateDim());
  StepInto(ConstSpan(state), ConstSpan(control), MutableSpan(next));
  return next;
}

Jacobians Dynamics::ComputeJacobians(const State& state,
                                     const Control& control) const {
  Validate(state, control);
  const int n = StateDim();
  const int m = ControlDim();
  State next(n);
  Jacobians jac{Eigen::MatrixXd(n, n), Eigen::MatrixXd(n, m)};
  JacobiansInto(ConstSpan(state), ConstSpan(control), MutableSpan(next),
                std::span<double>(jac.d_next_d_state.data(), n * n),
                std::span<double>(jac.d_next_d_control.data(), n * m));
  return jac;
}

StateTrajectory Rollout(const Dynamics& dynamics, const State& x0,
                        const ControlSequence& controls, int length) {
  if (length < 1) throw InvalidArgument("rollout: length must be >= 1");
  if (controls.rows() != length) {
    throw InvalidArgument("rollout: got " + std::to_string(controls.rows()) +
                          " controls for length " + std::to_string(length));
  }
  const int n = dynamics.StateDim();
  StateTrajectory states(length + 1, n);
  states.row(0) = x0.transpose();
  State x = x0;
  for (int t = 0; t < length; ++t) {
    x = dynamics.Step(x, controls.row(t).transpose());
    states.row(t + 1) = x.transpose();
  }
  return states;
}

void CartPoleParams::Validate() const {
  if (!(cart_mass > 0.0) || !(pole_mass > 0.0) || !(pole_half_length > 0.0)) {
    throw InvalidArgument("cartpole: masses and lengths must be > 0");
  }
  if (!(dt > 0.0)) throw InvalidArgument("cartpole: dt must be > 0");
  if (!std::isfinite(gravity) || cart_friction < 0.0 || pole_friction < 0.0) {
    throw InvalidArgument("cartpole: invalid gravity or friction");
  }
}

CartPole::CartPole(CartPoleParams params) : params_(params) {
  params_.Validate();
}

void PendulumParams::Validate() const {
  if (!(mass > 0.0) || !(length > 0.0)) {
    throw InvalidArgument("pendulum: mass and length must be > 0");
  }
  if (!(dt > 0.0)) throw InvalidArgument("pendulum: dt must be > 0");
  if (!std::isfinite(gravity) || damping < 0.0) {
    throw InvalidArgument("pendulum: invalid gravity or damping");
  }
}

Pendulum::Pendulum(PendulumParams params) : params_(params) {
  params_.Validate();
}

}  // namespace soppi
