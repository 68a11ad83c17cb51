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

#include "soppi/controller.h"

#include <atomic>
#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "soppi/thread_pool.h"

namespace soppi {
namespace {

void CopyRow(const ControlSequence& seq, int t, std::span<double> out) {
  for (Eigen::Index j = 0; j < seq.cols(); ++j) out[j] = seq(t, j);
}

bool Finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace

std::string AlgorithmName(Algorithm algo) {
  return algo == Algorithm::kMppi ? "mppi" : "soppi";
}

Algorithm ParseAlgorithm(const std::string& name) {
  if (name == "mppi") return Algorithm::kMppi;
  if (name == "soppi") return Algorithm::kSoppi;
  throw InvalidArgument("unknown algorithm '" + name +
                        "' (expected mppi or soppi)");
}

void ControllerConfig::Validate(const Dynamics& dynamics) const {
  if (num_samples < 1) throw InvalidArgument("controller: K must be >= 1");
  if (horizon < 1) throw InvalidArgument("controller: N must be >= 1");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("controller: lambda must be positive and finite");
  }
  if (sigma.size() != dynamics.ControlDim()) {
    throw InvalidArgument("controller: sigma has " +
                          std::to_string(sigma.size()) + " entries, system has " +
                          std::to_string(dynamics.ControlDim()) + " controls");
  }
  for (Eigen::Index j = 0; j < sigma.size(); ++j) {
    if (!(sigma[j] > 0.0) || !std::isfinite(sigma[j])) {
      throw InvalidArgument("controller: sigma must be positive and finite");
    }
  }
  svgd.Validate();
}

Eigen::VectorXd EvaluateBatch(const Dynamics& dynamics, const CostSpec& cost,
                              const State& x0, const SampleBatch& batch,
                              ThreadPool* pool) {
  const int n = dynamics.StateDim();
  const int m = dynamics.ControlDim();
  if (x0.size() != n) throw InvalidArgument("evaluate_batch: x0 dimension");
  if (cost.StateDim() != n || cost.ControlDim() != m) {
    throw InvalidArgument("evaluate_batch: cost and dynamics dimensions differ");
  }
  const int horizon = batch.horizon();
  Eigen::VectorXd costs(batch.num_samples());
  std::atomic<bool> diverged{false};
  ParallelFor(pool, batch.num_samples(), [&](int k) {
    const ControlSequence& controls = batch.controls[k];
    if (controls.rows() != horizon || controls.cols() != m) {
      throw InvalidArgument("evaluate_batch: sample " + std::to_string(k) +
                            " has the wrong shape");
    }
    std::vector<double> x(x0.data(), x0.data() + n);
    std::vector<double> next(n);
    std::vector<double> u(m);
    double total = 0.0;
    for (int t = 0; t < horizon; ++t) {
      CopyRow(controls, t, u);
      total += RunningCostRaw(cost, x, u, t);
      dynamics.StepInto(x, u, next);
      std::swap(x, next);
    }
    total += TerminalCostRaw(cost, x);
    if (!std::isfinite(total) || !Finite(x)) {
      total = std::numeric_limits<double>::infinity();
      diverged = true;
    }
    costs[k] = total;
  });
  if (diverged) {
    std::cerr << "soppi: warning: non-finite rollout; sample excluded\n";
  }
  return costs;
}

Eigen::VectorXd ComputeWeights(const Eigen::VectorXd& costs, double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("compute_weights: lambda <= 0");
  double beta = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < costs.size(); ++k) {
    if (std::isfinite(costs[k]) && costs[k] < beta) beta = costs[k];
  }
  if (!std::isfinite(beta)) {
    throw std::runtime_error("compute_weights: no viable samples");
  }
  Eigen::VectorXd weights(costs.size());
  double total = 0.0;
  for (Eigen::Index k = 0; k < costs.size(); ++k) {
    weights[k] =
        std::isfinite(costs[k]) ? std::exp(-(costs[k] - beta) / lambda) : 0.0;
    total += weights[k];
  }
  return weights / total;
}

ControlSequence UpdateNominal(const ControlSequence& base,
                              const std::vector<ControlSequence>& noises,
                              const Eigen::VectorXd& weights) {
  if (static_cast<Eigen::Index>(noises.size()) != weights.size()) {
    throw InvalidArgument("update_nominal: " + std::to_string(noises.size()) +
                          " noise samples for " +
                          std::to_string(weights.size()) + " weights");
  }
  ControlSequence u_star = base;
  for (size_t k = 0; k < noises.size(); ++k) {
    if (noises[k].rows() != base.rows() || noises[k].cols() != base.cols()) {
      throw InvalidArgument("update_nominal: noise sample " +
                            std::to_string(k) + " has the wrong shape");
    }
    u_star += weights[k] * noises[k];
  }
  return u_star;
}

Controller::Controller(const Dynamics& dynamics, CostSpec cost,
                       ControllerConfig config)
    : dynamics_(dynamics), cost_(std::move(cost)), config_(std::move(config)) {
  config_.Validate(dynamics_);
  cost_.Validate(config_.horizon);
  if (cost_.StateDim() != dynamics_.StateDim() ||
      cost_.ControlDim() != dynamics_.ControlDim()) {
    throw InvalidArgument("controller: cost and dynamics dimensions differ");
  }
  if (config_.num_threads != 1) {
    pool_ = std::make_unique<ThreadPool>(config_.num_threads);
  }
}

Controller::~Controller() = default;

void Controller::CheckInputs(const State& x0,
                             const ControlSequence& u_init) const {
  if (x0.size() != dynamics_.StateDim() || !AllFinite(x0)) {
    throw InvalidArgument("controller: x0 must be finite with dimension " +
                          std::to_string(dynamics_.StateDim()));
  }
  if (u_init.rows() != config_.horizon ||
      u_init.cols() != dynamics_.ControlDim() || !AllFinite(u_init)) {
    throw InvalidArgument("controller: U_init must be finite and " +
                          std::to_string(config_.horizon) + "x" +
                          std::to_string(dynamics_.ControlDim()));
  }
}

StepResult Controller::Finish(const State& x0, SampleBatch batch) const {
  StepResult result;
  result.costs = EvaluateBatch(dynamics_, cost_, x0, batch, pool_.get());
  result.weights = ComputeWeights(result.costs, config_.lambda);
  result.min_cost = result.costs.minCoeff();
  result.u_star = UpdateNominal(batch.base, batch.noise.samples, result.weights);
  result.applied = result.u_star.row(0).transpose();
  result.refined_batch = std::move(batch);
  return result;
}

StepResult Controller::MppiStep(const State& x0, const ControlSequence& u_init,
                                uint64_t stream) const {
  CheckInputs(x0, u_init);
  NoiseTensor noise =
      DrawNoise(config_.seed, config_.num_samples, config_.horizon,
                dynamics_.ControlDim(), config_.sigma, stream, pool_.get());
  return Finish(x0, Perturb(u_init, noise));
}

StepResult Controller::SoppiStep(const State& x0, const ControlSequence& u_init,
                                 uint64_t stream) const {
  CheckInputs(x0, u_init);
  NoiseTensor noise =
      DrawNoise(config_.seed, config_.num_samples, config_.horizon,
                dynamics_.ControlDim(), config_.sigma, stream, pool_.get());
  SampleBatch batch = Perturb(u_init, noise);
  const SvgdConfig& svgd = config_.svgd;
  if (svgd.iterations == 0) return Finish(x0, std::move(batch));

  const int n = dynamics_.StateDim();
  const int m = dynamics_.ControlDim();
  const int num_samples = config_.num_samples;
  // Row k of `states` is x_t of sample k.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> states(
      num_samples, n);
  states.rowwise() = x0.transpose();

  ParticleSet set{Eigen::MatrixXd(num_samples, m),
                  Eigen::MatrixXd(num_samples, m)};
  std::atomic<bool> diverged{false};
  for (int t = 0; t < config_.horizon; ++t) {
    for (int k = 0; k < num_samples; ++k) {
      set.particles.row(k) = batch.controls[k].row(t);
    }
    for (int iter = 0; iter < svgd.iterations; ++iter) {
      // Gradient of L(x_{t+1}, v_t) with respect to v_t through the dynamics.
      ParallelFor(pool_.get(), num_samples, [&](int k) {
        thread_local std::vector<double> scratch;
        scratch.resize(n + m + n + n * n + n * m + n + m);
        std::span<double> buf(scratch);
        std::span<double> u = buf.subspan(0, m);
        std::span<double> next = buf.subspan(m, n);
        std::span<double> d_state = buf.subspan(m + n, n * n);
        std::span<double> d_control = buf.subspan(m + n + n * n, n * m);
        std::span<double> g_x = buf.subspan(m + n + n * n + n * m, n);
        std::span<double> g_u = buf.subspan(m + 2 * n + n * n + n * m, m);
        for (int j = 0; j < m; ++j) u[j] = set.particles(k, j);
        const std::span<const double> x(states.row(k).data(), n);
        dynamics_.JacobiansInto(x, u, next, d_state, d_control);
        RunningCostGradientsRaw(cost_, next, u, t, g_x, g_u);
        bool finite = true;
        for (int j = 0; j < m; ++j) {
          double g = g_u[j];
          for (int r = 0; r < n; ++r) g += d_control[j * n + r] * g_x[r];
          set.grads(k, j) = g;
          finite = finite && std::isfinite(g);
        }
        // A sample whose rollout already blew up is carried along without
        // attraction; its final cost is +inf anyway.
        if (!finite && !Finite(x)) {
          set.grads.row(k).setZero();
          diverged = true;
        }
      });
      const Eigen::MatrixXd direction = SteinDirection(set, svgd, pool_.get());
      set = ApplyUpdate(set, direction, svgd.step_size);
    }
    ParallelFor(pool_.get(), num_samples, [&](int k) {
      thread_local std::vector<double> u, next;
      u.resize(m);
      next.resize(n);
      batch.controls[k].row(t) = set.particles.row(k);
      for (int j = 0; j < m; ++j) u[j] = set.particles(k, j);
      dynamics_.StepInto(std::span<const double>(states.row(k).data(), n), u,
                         next);
      for (int r = 0; r < n; ++r) states(k, r) = next[r];
    });
  }
  if (diverged) {
    std::cerr << "soppi: warning: diverged sample during refinement\n";
  }
  for (int k = 0; k < num_samples; ++k) {
    batch.noise.samples[k] = batch.controls[k] - batch.base;
  }
  return Finish(x0, std::move(batch));
}

StepResult Controller::Step(Algorithm algo, const State& x0,
                            const ControlSequence& u_init,
                            uint64_t stream) const {
  return algo == Algorithm::kMppi ? MppiStep(x0, u_init, stream)
                                  : SoppiStep(x0, u_init, stream);
}

TrialRecord Controller::RunEpisode(const State& x0, Algorithm algo,
                                   int num_steps) const {
  if (num_steps < 1) throw InvalidArgument("run_episode: T_total must be >= 1");
  const int horizon = config_.horizon;
  const int m = dynamics_.ControlDim();
  TrialRecord record;
  record.times.reserve(num_steps + 1);
  record.states.reserve(num_steps + 1);
  record.controls.reserve(num_steps);
  record.step_wall_times.reserve(num_steps);

  State x = x0;
  ControlSequence u_init = ControlSequence::Zero(horizon, m);
  record.times.push_back(0.0);
  record.states.push_back(x);
  for (int s = 0; s < num_steps; ++s) {
    const auto start = std::chrono::steady_clock::now();
    StepResult result = Step(algo, x, u_init, static_cast<uint64_t>(s));
    x = dynamics_.Step(x, result.applied);

    ControlSequence shifted(horizon, m);
    if (horizon > 1) {
      shifted.topRows(horizon - 1) = result.u_star.bottomRows(horizon - 1);
    }
    if (config_.tail_init) {
      const Control tail =
          config_.tail_init(x, result.u_star.bottomRows(horizon - 1));
      if (tail.size() != m || !AllFinite(tail)) {
        throw InvalidArgument("run_episode: tail initializer returned a bad control");
      }
      shifted.row(horizon - 1) = tail.transpose();
    } else {
      shifted.row(horizon - 1).setZero();
    }
    u_init = std::move(shifted);
    const auto stop = std::chrono::steady_clock::now();

    record.controls.push_back(result.applied);
    record.step_wall_times.push_back(
        std::chrono::duration<double>(stop - start).count());
    record.times.push_back((s + 1) * dynamics_.Dt());
    record.states.push_back(x);
  }
  return record;
}

}  // namespace soppi
