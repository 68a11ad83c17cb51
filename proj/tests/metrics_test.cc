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

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

namespace soppi {
namespace {

// One-dimensional record sampled every dt with signal f(t).
template <typename F>
TrialRecord Signal(int count, double dt, F f) {
  TrialRecord record;
  for (int i = 0; i < count; ++i) {
    record.times.push_back(i * dt);
    record.states.push_back(State::Constant(1, f(i * dt)));
    if (i + 1 < count) {
      record.controls.push_back(Control::Zero(1));
      record.step_wall_times.push_back(0.0);
    }
  }
  return record;
}

SettlingCriterion Band(double half_width) {
  SettlingCriterion c;
  c.band = half_width;
  return c;
}

TEST(MseTest, RampClosedForm) {
  // x_i = a i dt: mean of squares is a^2 dt^2 (N - 1)(2N - 1) / 6.
  const int n = 501;
  const double dt = 0.02, a = 1.7;
  const TrialRecord record = Signal(n, dt, [&](double t) { return a * t; });
  const double expected = a * a * dt * dt * (n - 1) * (2.0 * n - 1) / 6.0;
  EXPECT_NEAR(Mse(record, 0, 0.0), expected, 1e-12);
}

TEST(MseTest, ConstantOffsetAndWrapping) {
  const TrialRecord record =
      Signal(10, 0.1, [](double) { return 2 * std::numbers::pi + 0.5; });
  EXPECT_NEAR(Mse(record, 0, 0.0, true), 0.25, 1e-12);
  EXPECT_NEAR(Mse(record, 0, 0.5, false), 4 * std::numbers::pi * std::numbers::pi,
              1e-9);
  EXPECT_THROW(Mse(record, 1, 0.0), InvalidArgument);
}

TEST(SettlingTest, ExponentialDecayOracle) {
  // a e^{-t/tau} enters |x| <= b at tau ln(a / b).
  const double a = 2.0, tau = 0.7, b = 0.05, dt = 0.01;
  const TrialRecord record =
      Signal(1000, dt, [&](double t) { return a * std::exp(-t / tau); });
  const std::optional<double> ts = SettlingTime(record, Band(b));
  ASSERT_TRUE(ts.has_value());
  const double exact = tau * std::log(a / b);
  EXPECT_GE(*ts, exact - 1e-12);
  EXPECT_LT(*ts - exact, dt);
}

TEST(SettlingTest, AlwaysInBandIsZero) {
  const TrialRecord record = Signal(50, 0.1, [](double) { return 0.01; });
  EXPECT_EQ(SettlingTime(record, Band(0.1)), 0.0);
}

TEST(SettlingTest, NeverInBandIsNonConverged) {
  const TrialRecord record = Signal(50, 0.1, [](double) { return 1.0; });
  EXPECT_FALSE(SettlingTime(record, Band(0.1)).has_value());
}

TEST(SettlingTest, LateEntryIsNonConverged) {
  // In band only for the last 10% of the record.
  const TrialRecord record =
      Signal(100, 0.1, [](double t) { return t < 9.0 ? 1.0 : 0.0; });
  EXPECT_FALSE(SettlingTime(record, Band(0.1)).has_value());
}

TEST(SettlingTest, LeavingTheBandResetsTheClock) {
  const TrialRecord record = Signal(100, 0.1, [](double t) {
    return (t < 1.0 || (t > 3.0 && t < 3.5)) ? 1.0 : 0.0;
  });
  const std::optional<double> ts = SettlingTime(record, Band(0.1));
  ASSERT_TRUE(ts.has_value());
  EXPECT_NEAR(*ts, 3.5, 1e-12);
}

TEST(SettlingTest, FractionOfRangeAndAngles) {
  // theta settles near 2 pi, which wraps to the upright target 0.
  const TrialRecord record = Signal(100, 0.1, [](double t) {
    return t < 2.0 ? std::numbers::pi : 2 * std::numbers::pi + 0.1;
  });
  SettlingCriterion c;
  c.band = 0.05;  // half-width 0.05 pi ~ 0.157
  c.mode = BandMode::kFractionOfRange;
  c.angular = true;
  EXPECT_NEAR(c.HalfWidth(), 0.05 * std::numbers::pi, 1e-15);
  const std::optional<double> ts = SettlingTime(record, c);
  ASSERT_TRUE(ts.has_value());
  EXPECT_NEAR(*ts, 2.0, 1e-12);
  c.band = 0.02;  // 0.0628 < 0.1
  EXPECT_FALSE(SettlingTime(record, c).has_value());
}

TEST(SettlingTest, WiderBandNeverSettlesLater) {
  const TrialRecord record = Signal(400, 0.05, [](double t) {
    return std::exp(-t / 2.0) * std::cos(3.0 * t);
  });
  double previous = std::numeric_limits<double>::infinity();
  for (double band : {0.01, 0.02, 0.05, 0.1, 0.3, 1.0}) {
    const std::optional<double> ts = SettlingTime(record, Band(band));
    ASSERT_TRUE(ts.has_value());
    EXPECT_LE(*ts, previous);
    previous = *ts;
  }
}

TEST(RecordTest, ValidateChecksShapes) {
  TrialRecord record = Signal(5, 0.1, [](double t) { return t; });
  EXPECT_NO_THROW(record.Validate());
  record.controls.pop_back();
  EXPECT_THROW(record.Validate(), InvalidArgument);
  record = Signal(5, 0.1, [](double t) { return t; });
  record.times[2] = record.times[1];
  EXPECT_THROW(record.Validate(), InvalidArgument);
}

TEST(StudentTTest, IncompleteBetaSpecialCases) {
  EXPECT_NEAR(RegularizedIncompleteBeta(1.0, 1.0, 0.3), 0.3, 1e-14);
  EXPECT_NEAR(RegularizedIncompleteBeta(2.0, 3.0, 0.4),
              // 1 - (1 - x)^3 (1 + 3x)
              1.0 - std::pow(0.6, 3) * (1.0 + 3.0 * 0.4), 1e-14);
  EXPECT_EQ(RegularizedIncompleteBeta(2.0, 2.0, 0.0), 0.0);
  EXPECT_EQ(RegularizedIncompleteBeta(2.0, 2.0, 1.0), 1.0);
}

TEST(StudentTTest, CdfSymmetryAndCauchy) {
  EXPECT_NEAR(StudentTCdf(0.0, 3.0), 0.5, 1e-15);
  for (double t : {0.3, 1.0, 2.5}) {
    EXPECT_NEAR(StudentTCdf(t, 4.2) + StudentTCdf(-t, 4.2), 1.0, 1e-14);
    // dof = 1 is the Cauchy distribution.
    EXPECT_NEAR(StudentTCdf(t, 1.0), 0.5 + std::atan(t) / std::numbers::pi,
                1e-13);
  }
}

struct WelchCase {
  std::vector<double> a, b;
  double t, dof, p;
};

// scipy.stats.ttest_ind(a, b, equal_var=False, alternative="less");
// tests/oracles/welch_oracle.py.
const WelchCase kWelchCases[] = {
    {{1, 2, 3, 4, 5}, {2, 3, 4, 5, 6}, -1.0, 8.0, 0.17329675354366708},
    {{1.36, 1.41, 1.30, 1.38, 1.35}, {1.29, 1.27, 1.33, 1.28, 1.30},
     3.1608267412298052, 6.329360058600262, 0.990905922286119},
    {{1.29, 1.27, 1.33, 1.28, 1.30}, {1.36, 1.41, 1.30, 1.38, 1.35},
     -3.1608267412298052, 6.329360058600262, 0.009094077713881111},
    {{0.5, 0.7, 0.2, 0.9}, {0.4, 0.1, 0.6, 0.8, 0.3, 0.2}, 0.95434829551112,
     5.909425271781048, 0.8113511864939471},
    {{10.0, 12.5, 9.1, 11.7, 10.4, 13.0, 8.8}, {9.5, 9.9, 10.1},
     1.4739390076022951, 6.87145380079843, 0.907612225350353},
    {{-3.0, -1.0, 0.5, 2.0}, {-2.5, 1.5}, 0.055131784641997125,
     1.6080411217359871, 0.518953487812968},
    {{100.0, 101.0, 99.5}, {90.0, 95.0, 110.0, 85.0, 102.0}, 0.8496240601503757,
     4.079520811645717, 0.7787388672405714},
    {{1.97, 1.95, 1.99, 1.96, 1.98}, {1.87, 1.83, 1.91, 1.86, 1.88},
     6.741998624632408, 6.1656050955414115, 0.9997687576306429},
    {{0.001, 0.002, 0.0015, 0.0012}, {0.0011, 0.0021, 0.0016, 0.0013},
     -0.3251566887620424, 5.999999999999999, 0.37805079694412763},
    {{5.0, 5.1, 4.9, 5.2, 4.8, 5.05, 4.95, 5.15}, {3.0, 7.0, 4.0, 6.0, 5.5},
     -0.11352521203015184, 4.034958764608793, 0.45751941333011953},
};

TEST(WelchTest, MatchesReferenceValues) {
  for (const WelchCase& c : kWelchCases) {
    const WelchResult r = WelchTTestOneTailed(c.a, c.b);
    EXPECT_NEAR(r.t, c.t, 1e-10 * std::max(1.0, std::abs(c.t)));
    EXPECT_NEAR(r.dof, c.dof, 1e-10 * c.dof);
    EXPECT_NEAR(r.p, c.p, 1e-10);
  }
}

TEST(WelchTest, RejectsDegenerateGroups) {
  const std::vector<double> one = {1.0};
  const std::vector<double> flat = {2.0, 2.0, 2.0};
  const std::vector<double> ok = {1.0, 2.0, 3.0};
  const std::vector<double> with_nan = {1.0, std::nan(""), 3.0};
  EXPECT_THROW(WelchTTestOneTailed(one, ok), InvalidArgument);
  EXPECT_THROW(WelchTTestOneTailed(flat, flat), InvalidArgument);
  EXPECT_THROW(WelchTTestOneTailed(with_nan, ok), InvalidArgument);
}

TEST(SummaryTest, ExcludesNonConverged) {
  const SummaryRow row =
      SummarizeValues("ts", {1.0, std::nullopt, 3.0, 2.0, std::nullopt});
  EXPECT_EQ(row.n, 3);
  EXPECT_EQ(row.n_nonconverged, 2);
  EXPECT_DOUBLE_EQ(row.mean, 2.0);
  EXPECT_DOUBLE_EQ(row.std, 1.0);
  EXPECT_DOUBLE_EQ(row.median, 2.0);
}

TEST(SummaryTest, EvenMedianSingleValueAndEmpty) {
  EXPECT_DOUBLE_EQ(SummarizeValues("m", {4.0, 1.0, 3.0, 2.0}).median, 2.5);
  const SummaryRow single = SummarizeValues("m", {7.0});
  EXPECT_EQ(single.std, 0.0);
  const SummaryRow none = SummarizeValues("m", {std::nullopt});
  EXPECT_TRUE(std::isnan(none.mean));
  EXPECT_EQ(none.n_nonconverged, 1);
}

TEST(SummaryTest, CartPoleMetricColumns) {
  const std::vector<MetricSpec> metrics = CartPoleMetrics();
  ASSERT_EQ(metrics.size(), 7u);
  EXPECT_EQ(metrics[0].name, "mse_x");
  EXPECT_EQ(metrics[6].name, "ts_theta_10pct");
  EXPECT_NEAR(metrics[6].criterion.HalfWidth(), 0.1 * std::numbers::pi, 1e-15);
  TrialRecord record;
  for (int i = 0; i < 200; ++i) {
    record.times.push_back(0.02 * i);
    State x = State::Zero(4);
    x[2] = i < 50 ? std::numbers::pi : 0.0;
    record.states.push_back(x);
    if (i + 1 < 200) {
      record.controls.push_back(Control::Zero(1));
      record.step_wall_times.push_back(0.0);
    }
  }
  const std::vector<SummaryRow> rows = Summarize({record, record}, metrics);
  EXPECT_NEAR(rows[3].mean, 50.0 / 200.0 * std::numbers::pi * std::numbers::pi,
              1e-12);
  EXPECT_NEAR(rows[6].mean, 1.0, 1e-12);
  EXPECT_EQ(rows[6].n, 2);
}

}  // namespace
}  // namespace soppi
