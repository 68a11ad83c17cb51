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

#ifndef SOPPI_METRICS_H_
#define SOPPI_METRICS_H_

#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "soppi/types.h"

namespace soppi {

// Closed-loop log. states[i] is observed at times[i]; controls[i] and
// step_wall_times[i] belong to the transition from states[i] to states[i+1],
// so both are one shorter than states.
struct TrialRecord {
  std::vector<double> times;  // s
  std::vector<State> states;
  std::vector<Control> controls;
  std::vector<double> step_wall_times;  // s

  int num_states() const { return static_cast<int>(states.size()); }
  void Validate() const;
};

enum class BandMode {
  kAbsolute,         // band is a half-width in signal units
  kFractionOfRange,  // half-width is band * range
};

struct SettlingCriterion {
  int signal_index = 0;
  double target = 0.0;
  double band = 0.0;
  BandMode mode = BandMode::kAbsolute;
  double range = std::numbers::pi;
  bool angular = false;  // compare wrapped errors

  double HalfWidth() const {
    return mode == BandMode::kAbsolute ? band : band * range;
  }
};

// Mean over all recorded states of the squared error to `target`.
double Mse(const TrialRecord& record, int signal_index, double target,
           bool angular = false);

// Earliest recorded time after which the signal stays inside the band. The
// tail that is inside the band must cover at least a quarter of the record,
// otherwise (and when the last sample is outside) the trial counts as not
// converged and nullopt is returned.
std::optional<double> SettlingTime(const TrialRecord& record,
                                   const SettlingCriterion& criterion);

// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
double RegularizedIncompleteBeta(double a, double b, double x);
// P(T < t) for Student's t with `dof` degrees of freedom.
double StudentTCdf(double t, double dof);

struct WelchResult {
  double t = 0.0;
  double dof = 0.0;
  double p = 0.0;  // one-tailed, alternative mean_a < mean_b
};

// Unequal-variance t-test of "a is smaller than b". Throws InvalidArgument
// when a group has fewer than two finite values or zero variance.
WelchResult WelchTTestOneTailed(std::span<const double> a,
                                std::span<const double> b);

enum class MetricKind { kMse, kSettlingTime };

struct MetricSpec {
  std::string name;
  MetricKind kind = MetricKind::kMse;
  // For kMse only signal_index, target and angular are used.
  SettlingCriterion criterion;
};

// The cart-pole columns: MSE and settling times for x (0.25 m, 0.5 m) and
// theta (2%, 5%, 10% of pi).
std::vector<MetricSpec> CartPoleMetrics();

// nullopt marks a non-converged settling time.
std::optional<double> EvaluateMetric(const TrialRecord& record,
                                     const MetricSpec& metric);

struct SummaryRow {
  std::string metric;
  double mean = 0.0;
  double std = 0.0;  // sample (n - 1); 0 when n == 1
  double median = 0.0;
  int n = 0;  // converged trials contributing to mean/std/median
  int n_nonconverged = 0;
};

// Non-converged trials are counted separately and excluded from the
// statistics. Statistics are NaN when no trial contributes.
SummaryRow SummarizeValues(const std::string& metric,
                           const std::vector<std::optional<double>>& values);
std::vector<SummaryRow> Summarize(const std::vector<TrialRecord>& trials,
                                  const std::vector<MetricSpec>& metrics);

}  // namespace soppi

#endif  // SOPPI_METRICS_H_
