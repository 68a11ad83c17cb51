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

#ifndef SOPPI_CONFIG_H_
#define SOPPI_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "soppi/controller.h"
#include "soppi/cost.h"
#include "soppi/dynamics.h"
#include "soppi/metrics.h"

namespace soppi {

struct SystemConfig {
  // "cartpole", "pendulum", "double_integrator" or "double_integrator_2d".
  std::string type = "cartpole";
  CartPoleParams cartpole;
  PendulumParams pendulum;
  double dt = 0.02;  // for the double integrators

  std::unique_ptr<Dynamics> MakeDynamics() const;
  int StateDim() const;
  int ControlDim() const;
};

struct ExperimentConfig {
  SystemConfig system;
  CostSpec cost;
  ControllerConfig controller;  // controller.svgd holds the svgd section
  std::vector<Algorithm> algos = {Algorithm::kMppi, Algorithm::kSoppi};
  int n_trials = 5;
  uint64_t base_seed = 0;
  double t_total = 20.0;  // s
  State x0;
  std::filesystem::path output_dir = "soppi_out";
  int trial_threads = 1;
  // When false every wall_ms entry is written as 0 so record files are
  // byte-for-byte reproducible.
  bool record_wall_time = true;
  std::vector<MetricSpec> metrics;

  // Number of controller steps covering t_total.
  int NumSteps() const;
  void Validate() const;
};

// Cart-pole defaults: Q = diag(1.25, 1, 12, 0.25), R = 1e-3, Q_T = 10 Q,
// swing-up from (0, 0, pi, 0) to the origin with theta wrapped.
ExperimentConfig DefaultExperimentConfig(const std::string& system_type);

// Parses the {system, cost, controller, svgd, experiment} document. Missing
// keys take the defaults of the chosen system; unknown keys are rejected.
ExperimentConfig ParseExperimentConfig(const nlohmann::json& doc);
ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path);

// Full snapshot; ParseExperimentConfig(ToJson(c)) reproduces c.
nlohmann::json ToJson(const ExperimentConfig& config);

}  // namespace soppi

#endif  // SOPPI_CONFIG_H_
