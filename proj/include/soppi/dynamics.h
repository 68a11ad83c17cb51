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

#ifndef SOPPI_DYNAMICS_H_
#define SOPPI_DYNAMICS_H_

#include <array>
#include <span>
#include <string>

#include <Eigen/Core>

#include "soppi/dual.h"
#include "soppi/types.h"

namespace soppi {

struct Jacobians {
  Eigen::MatrixXd d_next_d_state;    // n x n
  Eigen::MatrixXd d_next_d_control;  // n x m
};

// Discrete-time system x_{t+1} = F(x_t, v_t). Implementations are immutable
// after construction, so every method may be called concurrently.
class Dynamics {
 public:
  virtual ~Dynamics() = default;

  virtual int StateDim() const = 0;
  virtual int ControlDim() const = 0;
  virtual double Dt() const = 0;
  virtual std::string Name() const = 0;

  // Unchecked hot-path entry points. Spans must have the system's sizes.
  // Jacobian outputs are column-major: n x n and n x m.
  virtual void StepInto(std::span<const double> state,
                        std::span<const double> control,
                        std::span<double> next) const = 0;
  virtual void JacobiansInto(std::span<const double> state,
                             std::span<const double> control,
                             std::span<double> next,
                             std::span<double> d_next_d_state,
                             std::span<double> d_next_d_control) const = 0;

  // Checked versions: throw InvalidArgument on size mismatch or non-finite
  // input.
  State Step(const State& state, const Control& control) const;
  Jacobians ComputeJacobians(const State& state, const Control& control) const;

  void Validate(const State& state, const Control& control) const;
};

// Returns the (length + 1) x n trajectory obtained by applying the first
// `length` rows of `controls` from x0.
StateTrajectory Rollout(const Dynamics& dynamics, const State& x0,
                        const ControlSequence& controls, int length);

// Adapts a model with compile-time dimensions to Dynamics. Model provides
//   template <typename S> void Advance(const std::array<S, kN>& x,
//                                      const std::array<S, kM>& u,
//                                      std::array<S, kN>& next) const;
// which is instantiated with double for stepping and with Dual<kN + kM> for
// exact Jacobians.
template <class Model, int kN, int kM>
class FixedDimSystem : public Dynamics {
 public:
  static constexpr int kStateDim = kN;
  static constexpr int kControlDim = kM;

  int StateDim() const override { return kN; }
  int ControlDim() const override { return kM; }

  void StepInto(std::span<const double> state, std::span<const double> control,
                std::span<double> next) const override {
    std::array<double, kN> x;
    std::array<double, kM> u;
    std::array<double, kN> out;
    for (int i = 0; i < kN; ++i) x[i] = state[i];
    for (int j = 0; j < kM; ++j) u[j] = control[j];
    static_cast<const Model&>(*this).Advance(x, u, out);
    for (int i = 0; i < kN; ++i) next[i] = out[i];
  }

  void JacobiansInto(std::span<const double> state,
                     std::span<const double> control, std::span<double> next,
                     std::span<double> d_next_d_state,
                     std::span<double> d_next_d_control) const override {
    using D = Dual<kN + kM>;
    std::array<D, kN> x;
    std::array<D, kM> u;
    std::array<D, kN> out;
    for (int i = 0; i < kN; ++i) x[i] = D(state[i], i);
    for (int j = 0; j < kM; ++j) u[j] = D(control[j], kN + j);
    static_cast<const Model&>(*this).Advance(x, u, out);
    for (int r = 0; r < kN; ++r) {
      next[r] = out[r].value;
      for (int c = 0; c < kN; ++c) d_next_d_state[c * kN + r] = out[r].grad[c];
      for (int c = 0; c < kM; ++c) {
        d_next_d_control[c * kN + r] = out[r].grad[kN + c];
      }
    }
  }
};

struct CartPoleParams {
  double cart_mass = 1.0;         // kg
  double pole_mass = 0.1;         // kg
  double pole_half_length = 0.5;  // m
  double gravity = 9.8;           // m/s^2
  double dt = 0.02;               // s
  double cart_friction = 0.0;     // Coulomb coefficient on the cart
  double pole_friction = 0.0;     // viscous coefficient at the pivot
  double force_limit = 0.0;       // N, clamp disabled when <= 0

  void Validate() const;
};

// Cart-pole with theta = 0 upright, state (x, x_dot, theta, theta_dot) and a
// horizontal force on the cart. Florian's equations of motion integrated with
// semi-implicit Euler (velocities first). Theta is never wrapped here.
class CartPole : public FixedDimSystem<CartPole, 4, 1> {
 public:
  explicit CartPole(CartPoleParams params = {});

  double Dt() const override { return params_.dt; }
  std::string Name() const override { return "cartpole"; }
  const CartPoleParams& params() const { return params_; }

  template <typename S>
  void Advance(const std::array<S, 4>& x, const std::array<S, 1>& u,
               std::array<S, 4>& next) const {
    using std::cos;
    using std::sin;
    const CartPoleParams& p = params_;
    S force = u[0];
    if (p.force_limit > 0.0) force = clamp(force, -p.force_limit, p.force_limit);
    const double total_mass = p.cart_mass + p.pole_mass;
    const double pole_moment = p.pole_mass * p.pole_half_length;
    const S sin_theta = sin(x[2]);
    const S cos_theta = cos(x[2]);
    const S cart_friction = p.cart_friction * sign(x[1]);

    const S temp =
        (force + pole_moment * x[3] * x[3] * sin_theta - cart_friction) /
        total_mass;
    const S theta_acc =
        (p.gravity * sin_theta - cos_theta * temp -
         p.pole_friction * x[3] / pole_moment) /
        (p.pole_half_length *
         (4.0 / 3.0 - p.pole_mass * cos_theta * cos_theta / total_mass));
    const S x_acc = temp - pole_moment * theta_acc * cos_theta / total_mass;

    next[1] = x[1] + p.dt * x_acc;
    next[0] = x[0] + p.dt * next[1];
    next[3] = x[3] + p.dt * theta_acc;
    next[2] = x[2] + p.dt * next[3];
  }

 private:
  CartPoleParams params_;
};

struct PendulumParams {
  double mass = 1.0;     // kg
  double length = 1.0;   // m
  double gravity = 9.8;  // m/s^2
  double damping = 0.0;  // 1/s
  double dt = 0.02;      // s

  void Validate() const;
};

// Point-mass pendulum, theta = 0 hanging, torque input.
class Pendulum : public FixedDimSystem<Pendulum, 2, 1> {
 public:
  explicit Pendulum(PendulumParams params = {});

  double Dt() const override { return params_.dt; }
  std::string Name() const override { return "pendulum"; }

  template <typename S>
  void Advance(const std::array<S, 2>& x, const std::array<S, 1>& u,
               std::array<S, 2>& next) const {
    const PendulumParams& p = params_;
    using std::sin;
    const S theta_acc = -(p.gravity / p.length) * sin(x[0]) +
                        u[0] / (p.mass * p.length * p.length) -
                        p.damping * x[1];
    next[1] = x[1] + p.dt * theta_acc;
    next[0] = x[0] + p.dt * next[1];
  }

 private:
  PendulumParams params_;
};

// kDims independent unit-mass axes: state (p_1..p_D, v_1..v_D), control
// accelerations. Linear, x_{t+1} = A x_t + B u_t.
template <int kDims>
class DoubleIntegratorT
    : public FixedDimSystem<DoubleIntegratorT<kDims>, 2 * kDims, kDims> {
 public:
  explicit DoubleIntegratorT(double dt = 0.05) : dt_(dt) {
    if (!(dt > 0.0)) throw InvalidArgument("double integrator: dt must be > 0");
  }

  double Dt() const override { return dt_; }
  std::string Name() const override {
    return kDims == 1 ? "double_integrator"
                      : "double_integrator_" + std::to_string(kDims) + "d";
  }

  template <typename S>
  void Advance(const std::array<S, 2 * kDims>& x, const std::array<S, kDims>& u,
               std::array<S, 2 * kDims>& next) const {
    for (int d = 0; d < kDims; ++d) {
      next[kDims + d] = x[kDims + d] + dt_ * u[d];
      next[d] = x[d] + dt_ * next[kDims + d];
    }
  }

 private:
  double dt_;
};

using DoubleIntegrator = DoubleIntegratorT<1>;
using PlanarDoubleIntegrator = DoubleIntegratorT<2>;

}  // namespace soppi

#endif  // SOPPI_DYNAMICS_H_
