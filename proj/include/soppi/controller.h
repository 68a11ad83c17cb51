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

#ifndef SOPPI_CONTROLLER_H_
#define SOPPI_CONTROLLER_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "soppi/cost.h"
#include "soppi/dynamics.h"
#include "soppi/metrics.h"
#include "soppi/sampling.h"
#include "soppi/svgd.h"
#include "soppi/types.h"

namespace soppi {

class ThreadPool;

enum class Algorithm { kMppi, kSoppi };

std::string AlgorithmName(Algorithm algo);
// Accepts "mppi" or "soppi".
Algorithm ParseAlgorithm(const std::string& name);

// Produces the last entry of the shifted nominal sequence from the state the
// system moved to and the N-1 retained entries. Empty means append zero.
using TailInit =
    std::function<Control(const State& x_next, const ControlSequence& head)>;

struct ControllerConfig {
  int num_samples = 500;  // K
  int horizon = 80;       // N
  double lambda = 10.0;   // softmax temperature
  Eigen::VectorXd sigma = Eigen::VectorXd::Constant(1, 10.0);  // per dim
  uint64_t seed = 0;
  SvgdConfig svgd;
  TailInit tail_init;
  // Threads for per-sample work; results do not depend on this.
  int num_threads = 1;

  void Validate(const Dynamics& dynamics) const;
};

struct StepResult {
  ControlSequence u_star;  // N x m
  Control applied;         // u_star row 0
  Eigen::VectorXd weights;
  Eigen::VectorXd costs;
  double min_cost = 0.0;
  SampleBatch refined_batch;
};

// Cost-to-go of every sample's rollout from x0. Samples whose rollout leaves
// the finite range get +infinity.
Eigen::VectorXd EvaluateBatch(const Dynamics& dynamics, const CostSpec& cost,
                              const State& x0, const SampleBatch& batch,
                              ThreadPool* pool = nullptr);

// Softmax of -(S_k - min S) / lambda over the finite costs; infinite or NaN
// costs get weight 0. Throws when no cost is finite.
Eigen::VectorXd ComputeWeights(const Eigen::VectorXd& costs, double lambda);

// base + sum_k w_k eps_k.
ControlSequence UpdateNominal(const ControlSequence& base,
                              const std::vector<ControlSequence>& noises,
                              const Eigen::VectorXd& weights);

// Receding-horizon MPPI / SOPPI controller for one system and cost. Step
// calls are const and deterministic in (config.seed, stream, x0, u_init).
class Controller {
 public:
  Controller(const Dynamics& dynamics, CostSpec cost, ControllerConfig config);
  ~Controller();

  const ControllerConfig& config() const { return config_; }
  const CostSpec& cost() const { return cost_; }

  StepResult MppiStep(const State& x0, const ControlSequence& u_init,
                      uint64_t stream = 0) const;

  // MPPI whose samples are refined one timestep at a time by
  // config.svgd.iterations SVGD updates on the single-step cost
  // L(x_{t+1}, v_t) before weighting. With zero iterations the result is
  // bit-identical to MppiStep.
  StepResult SoppiStep(const State& x0, const ControlSequence& u_init,
                       uint64_t stream = 0) const;

  StepResult Step(Algorithm algo, const State& x0, const ControlSequence& u_init,
                  uint64_t stream = 0) const;

  // Closed loop for num_steps: plan, apply u*_0 to the dynamics, shift the
  // nominal sequence. Step s draws its noise from stream s.
  TrialRecord RunEpisode(const State& x0, Algorithm algo, int num_steps) const;

 private:
  void CheckInputs(const State& x0, const ControlSequence& u_init) const;
  StepResult Finish(const State& x0, SampleBatch batch) const;

  const Dynamics& dynamics_;
  CostSpec cost_;
  ControllerConfig config_;
  std::unique_ptr<ThreadPool> pool_;
};

}  // namespace soppi

#endif  // SOPPI_CONTROLLER_H_
