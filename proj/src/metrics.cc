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

#include "soppi/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace soppi {
namespace {

double SignalError(const TrialRecord& record, int i, int signal_index,
                   double target, bool angular) {
  const State& x = record.states[i];
  if (signal_index < 0 || signal_index >= x.size()) {
    throw InvalidArgument("metrics: signal index " +
                          std::to_string(signal_index) + " out of range");
  }
  const double error = x[signal_index] - target;
  return angular ? WrapAngle(error) : error;
}

// Continued fraction for I_x(a, b), Numerical Recipes "betacf" form.
double BetaContinuedFraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kTolerance = 1e-12;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kTolerance) return h;
  }
  throw std::runtime_error("incomplete beta: continued fraction did not converge");
}

double Median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // sample
  int n = 0;
};

Moments SampleMoments(std::span<const double> values, const char* group) {
  Moments m;
  m.n = static_cast<int>(values.size());
  if (m.n < 2) {
    throw InvalidArgument(std::string("welch: group ") + group +
                          " needs at least two values");
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw InvalidArgument(std::string("welch: group ") + group +
                            " has a non-finite value");
    }
    m.mean += v;
  }
  m.mean /= m.n;
  for (double v : values) m.variance += (v - m.mean) * (v - m.mean);
  m.variance /= (m.n - 1);
  if (!(m.variance > 0.0)) {
    throw InvalidArgument(std::string("welch: group ") + group +
                          " has zero variance");
  }
  return m;
}

}  // namespace

void TrialRecord::Validate() const {
  if (states.empty()) throw InvalidArgument("trial record: no states");
  if (times.size() != states.size()) {
    throw InvalidArgument("trial record: times and states differ in length");
  }
  if (controls.size() + 1 != states.size() ||
      step_wall_times.size() != controls.size()) {
    throw InvalidArgument(
        "trial record: controls and wall times must be one shorter than states");
  }
  for (size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw InvalidArgument("trial record: times must be strictly increasing");
    }
  }
}

double Mse(const TrialRecord& record, int signal_index, double target,
           bool angular) {
  if (record.states.empty()) throw InvalidArgument("mse: empty record");
  double total = 0.0;
  for (int i = 0; i < record.num_states(); ++i) {
    const double e = SignalError(record, i, signal_index, target, angular);
    total += e * e;
  }
  return total / record.num_states();
}

std::optional<double> SettlingTime(const TrialRecord& record,
                                   const SettlingCriterion& criterion) {
  if (record.states.empty()) throw InvalidArgument("settling_time: empty record");
  if (!(criterion.band > 0.0)) {
    throw InvalidArgument("settling_time: band must be > 0");
  }
  const double half_width = criterion.HalfWidth();
  const int count = record.num_states();
  int first_settled = count;
  for (int i = count - 1; i >= 0; --i) {
    const double e = SignalError(record, i, criterion.signal_index,
                                 criterion.target, criterion.angular);
    if (!(std::fabs(e) <= half_width)) break;
    first_settled = i;
  }
  const int tail = count - first_settled;
  const int required = (count + 3) / 4;
  if (tail == 0 || tail < required) return std::nullopt;
  return record.times[first_settled];
}

double RegularizedIncompleteBeta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw InvalidArgument("incomplete beta: a and b must be > 0");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw InvalidArgument("incomplete beta: x must lie in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) -
                           std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * BetaContinuedFraction(a, b, x) / a;
  }
  return 1.0 - front * BetaContinuedFraction(b, a, 1.0 - x) / b;
}

double StudentTCdf(double t, double dof) {
  if (!(dof > 0.0)) throw InvalidArgument("student t: dof must be > 0");
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double x = dof / (dof + t * t);
  const double tail = 0.5 * RegularizedIncompleteBeta(0.5 * dof, 0.5, x);
  return t < 0.0 ? tail : 1.0 - tail;
}

WelchResult WelchTTestOneTailed(std::span<const double> a,
                                std::span<const double> b) {
  const Moments ma = SampleMoments(a, "a");
  const Moments mb = SampleMoments(b, "b");
  const double va = ma.variance / ma.n;
  const double vb = mb.variance / mb.n;
  WelchResult result;
  result.t = (ma.mean - mb.mean) / std::sqrt(va + vb);
  result.dof = (va + vb) * (va + vb) /
               (va * va / (ma.n - 1) + vb * vb / (mb.n - 1));
  result.p = StudentTCdf(result.t, result.dof);
  return result;
}

std::vector<MetricSpec> CartPoleMetrics() {
  auto settle = [](std::string name, int index, double band, BandMode mode,
                   bool angular) {
    MetricSpec spec{std::move(name), MetricKind::kSettlingTime, {}};
    spec.criterion.signal_index = index;
    spec.criterion.band = band;
    spec.criterion.mode = mode;
    spec.criterion.angular = angular;
    return spec;
  };
  MetricSpec mse_x{"mse_x", MetricKind::kMse, {}};
  mse_x.criterion.signal_index = 0;
  MetricSpec mse_theta{"mse_theta", MetricKind::kMse, {}};
  mse_theta.criterion.signal_index = 2;
  mse_theta.criterion.angular = true;
  return {
      mse_x,
      settle("ts_x_0.25m", 0, 0.25, BandMode::kAbsolute, false),
      settle("ts_x_0.5m", 0, 0.5, BandMode::kAbsolute, false),
      mse_theta,
      settle("ts_theta_2pct", 2, 0.02, BandMode::kFractionOfRange, true),
      settle("ts_theta_5pct", 2, 0.05, BandMode::kFractionOfRange, true),
      settle("ts_theta_10pct", 2, 0.10, BandMode::kFractionOfRange, true),
  };
}

std::optional<double> EvaluateMetric(const TrialRecord& record,
                                     const MetricSpec& metric) {
  const SettlingCriterion& c = metric.criterion;
  if (metric.kind == MetricKind::kMse) {
    return Mse(record, c.signal_index, c.target, c.angular);
  }
  return SettlingTime(record, c);
}

SummaryRow SummarizeValues(const std::string& metric,
                           const std::vector<std::optional<double>>& values) {
  SummaryRow row;
  row.metric = metric;
  std::vector<double> converged;
  for (const std::optional<double>& v : values) {
    if (v) {
      converged.push_back(*v);
    } else {
      ++row.n_nonconverged;
    }
  }
  row.n = static_cast<int>(converged.size());
  if (converged.empty()) {
    row.mean = row.std = row.median = std::numeric_limits<double>::quiet_NaN();
    return row;
  }
  double sum = 0.0;
  for (double v : converged) sum += v;
  row.mean = sum / row.n;
  if (row.n > 1) {
    double ss = 0.0;
    for (double v : converged) ss += (v - row.mean) * (v - row.mean);
    row.std = std::sqrt(ss / (row.n - 1));
  }
  row.median = Median(converged);
  return row;
}

std::vector<SummaryRow> Summarize(const std::vector<TrialRecord>& trials,
                                  const std::vector<MetricSpec>& metrics) {
  std::vector<SummaryRow> rows;
  rows.reserve(metrics.size());
  for (const MetricSpec& metric : metrics) {
    std::vector<std::optional<double>> values;
    values.reserve(trials.size());
    for (const TrialRecord& trial : trials) {
      values.push_back(EvaluateMetric(trial, metric));
    }
    rows.push_back(SummarizeValues(metric.name, values));
  }
  return rows;
}

}  // namespace soppi
