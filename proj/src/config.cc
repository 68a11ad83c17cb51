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

#include "soppi/config.h"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <set>
#include <string>

namespace soppi {
namespace {

using nlohmann::json;

void RejectUnknown(const json& obj, std::initializer_list<const char*> allowed,
                   const std::string& section) {
  if (!obj.is_object()) {
    throw InvalidArgument("config: section '" + section + "' must be an object");
  }
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& item : obj.items()) {
    if (!keys.contains(item.key())) {
      throw InvalidArgument("config: unknown key '" + section + "." +
                            item.key() + "'");
    }
  }
}

template <typename T>
void Read(const json& obj, const char* key, T& out, const std::string& section) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument("config: bad value for '" + section + "." + key +
                          "': " + e.what());
  }
}

Eigen::VectorXd ParseVector(const json& value, int dim, const std::string& name) {
  Eigen::VectorXd v(dim);
  if (value.is_number()) {
    v.setConstant(value.get<double>());
    return v;
  }
  if (!value.is_array() || static_cast<int>(value.size()) != dim) {
    throw InvalidArgument("config: '" + name + "' must be a number or a list of " +
                          std::to_string(dim) + " numbers");
  }
  for (int i = 0; i < dim; ++i) v[i] = value[i].get<double>();
  return v;
}

// Number: scalar * I. Flat list: diagonal. List of lists: full matrix.
Eigen::MatrixXd ParseMatrix(const json& value, int dim, const std::string& name) {
  if (value.is_number()) {
    return value.get<double>() * Eigen::MatrixXd::Identity(dim, dim);
  }
  if (value.is_array() && !value.empty() && value[0].is_array()) {
    if (static_cast<int>(value.size()) != dim) {
      throw InvalidArgument("config: '" + name + "' must have " +
                            std::to_string(dim) + " rows");
    }
    Eigen::MatrixXd m(dim, dim);
    for (int r = 0; r < dim; ++r) {
      if (static_cast<int>(value[r].size()) != dim) {
        throw InvalidArgument("config: '" + name + "' row " + std::to_string(r) +
                              " must have " + std::to_string(dim) + " entries");
      }
      for (int c = 0; c < dim; ++c) m(r, c) = value[r][c].get<double>();
    }
    return m;
  }
  return ParseVector(value, dim, name).asDiagonal();
}

json MatrixToJson(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

json VectorToJson(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

std::vector<MetricSpec> DefaultMetrics(const SystemConfig& system) {
  if (system.type == "cartpole") return CartPoleMetrics();
  std::vector<MetricSpec> metrics;
  for (int i = 0; i < system.StateDim(); ++i) {
    MetricSpec spec{"mse_state_" + std::to_string(i), MetricKind::kMse, {}};
    spec.criterion.signal_index = i;
    spec.criterion.angular = system.type == "pendulum" && i == 0;
    metrics.push_back(spec);
  }
  return metrics;
}

MetricSpec ParseMetric(const json& obj) {
  RejectUnknown(obj,
                {"name", "kind", "signal", "target", "angular", "band", "mode",
                 "range"},
                "experiment.metrics[]");
  MetricSpec spec;
  std::string kind = "mse";
  std::string mode = "absolute";
  Read(obj, "name", spec.name, "metric");
  Read(obj, "kind", kind, "metric");
  Read(obj, "signal", spec.criterion.signal_index, "metric");
  Read(obj, "target", spec.criterion.target, "metric");
  Read(obj, "angular", spec.criterion.angular, "metric");
  Read(obj, "band", spec.criterion.band, "metric");
  Read(obj, "mode", mode, "metric");
  Read(obj, "range", spec.criterion.range, "metric");
  if (spec.name.empty()) throw InvalidArgument("config: metric without a name");
  if (kind == "mse") {
    spec.kind = MetricKind::kMse;
  } else if (kind == "settling") {
    spec.kind = MetricKind::kSettlingTime;
    if (!(spec.criterion.band > 0.0)) {
      throw InvalidArgument("config: metric '" + spec.name + "' needs band > 0");
    }
  } else {
    throw InvalidArgument("config: metric kind must be mse or settling");
  }
  if (mode == "absolute") {
    spec.criterion.mode = BandMode::kAbsolute;
  } else if (mode == "fraction") {
    spec.criterion.mode = BandMode::kFractionOfRange;
  } else {
    throw InvalidArgument("config: metric mode must be absolute or fraction");
  }
  return spec;
}

json MetricToJson(const MetricSpec& spec) {
  const SettlingCriterion& c = spec.criterion;
  json out = {{"name", spec.name},
              {"kind", spec.kind == MetricKind::kMse ? "mse" : "settling"},
              {"signal", c.signal_index},
              {"target", c.target},
              {"angular", c.angular}};
  if (spec.kind == MetricKind::kSettlingTime) {
    out["band"] = c.band;
    out["mode"] = c.mode == BandMode::kAbsolute ? "absolute" : "fraction";
    out["range"] = c.range;
  }
  return out;
}

}  // namespace

std::unique_ptr<Dynamics> SystemConfig::MakeDynamics() const {
  if (type == "cartpole") return std::make_unique<CartPole>(cartpole);
  if (type == "pendulum") return std::make_unique<Pendulum>(pendulum);
  if (type == "double_integrator") return std::make_unique<DoubleIntegrator>(dt);
  if (type == "double_integrator_2d") {
    return std::make_unique<PlanarDoubleIntegrator>(dt);
  }
  throw InvalidArgument("config: unknown system type '" + type + "'");
}

int SystemConfig::StateDim() const { return MakeDynamics()->StateDim(); }
int SystemConfig::ControlDim() const { return MakeDynamics()->ControlDim(); }

int ExperimentConfig::NumSteps() const {
  const double dt = system.MakeDynamics()->Dt();
  return static_cast<int>(std::llround(t_total / dt));
}

void ExperimentConfig::Validate() const {
  const std::unique_ptr<Dynamics> dynamics = system.MakeDynamics();
  controller.Validate(*dynamics);
  cost.Validate(controller.horizon);
  if (cost.StateDim() != dynamics->StateDim() ||
      cost.ControlDim() != dynamics->ControlDim()) {
    throw InvalidArgument("config: cost dimensions do not match the system");
  }
  if (x0.size() != dynamics->StateDim() || !AllFinite(x0)) {
    throw InvalidArgument("config: x0 must be finite with dimension " +
                          std::to_string(dynamics->StateDim()));
  }
  if (algos.empty()) throw InvalidArgument("config: algos must be non-empty");
  if (n_trials < 1) throw InvalidArgument("config: n_trials must be >= 1");
  if (!(t_total > 0.0) || NumSteps() < 1) {
    throw InvalidArgument("config: T_total must cover at least one step");
  }
  if (trial_threads < 0) {
    throw InvalidArgument("config: trial_threads must be >= 0");
  }
  for (const MetricSpec& metric : metrics) {
    if (metric.criterion.signal_index < 0 ||
        metric.criterion.signal_index >= dynamics->StateDim()) {
      throw InvalidArgument("config: metric '" + metric.name +
                            "' refers to a missing state dimension");
    }
  }
}

ExperimentConfig DefaultExperimentConfig(const std::string& system_type) {
  ExperimentConfig config;
  config.system.type = system_type;
  const std::unique_ptr<Dynamics> dynamics = config.system.MakeDynamics();
  const int n = dynamics->StateDim();
  const int m = dynamics->ControlDim();

  config.cost = ZeroCost(n, m);
  config.controller.sigma = Eigen::VectorXd::Constant(m, 10.0);
  config.x0 = State::Zero(n);
  if (system_type == "cartpole") {
    Eigen::VectorXd q(4);
    q << 1.25, 1.0, 12.0, 0.25;
    config.cost.Q = q.asDiagonal();
    config.cost.R = 1e-3 * Eigen::MatrixXd::Identity(1, 1);
    config.cost.Q_T = 10.0 * config.cost.Q;
    config.cost.angle_dims = {2};
    config.x0[2] = std::numbers::pi;
    config.controller.sigma.setConstant(5.0);
    config.controller.lambda = 1.0;
  } else {
    config.cost.Q = Eigen::MatrixXd::Identity(n, n);
    config.cost.R = 1e-2 * Eigen::MatrixXd::Identity(m, m);
    config.cost.Q_T = 10.0 * config.cost.Q;
    config.controller.sigma.setConstant(1.0);
    config.controller.lambda = 1.0;
    if (system_type == "pendulum") {
      config.cost.angle_dims = {0};
      config.cost.x_target[0] = std::numbers::pi;
    } else {
      config.x0[0] = 1.0;
    }
  }
  config.metrics = DefaultMetrics(config.system);
  return config;
}

ExperimentConfig ParseExperimentConfig(const json& doc) {
  RejectUnknown(doc, {"system", "cost", "controller", "svgd", "experiment"},
                "<root>");
  const json empty = json::object();
  const json& sys = doc.contains("system") ? doc.at("system") : empty;
  RejectUnknown(sys,
                {"type", "cart_mass", "pole_mass", "pole_half_length", "gravity",
                 "dt", "cart_friction", "pole_friction", "force_limit", "mass",
                 "length", "damping"},
                "system");
  std::string type = "cartpole";
  Read(sys, "type", type, "system");
  ExperimentConfig config = DefaultExperimentConfig(type);
  const std::set<std::string> cartpole_only = {
      "cart_mass", "pole_mass", "pole_half_length", "cart_friction",
      "pole_friction", "force_limit"};
  const std::set<std::string> pendulum_only = {"mass", "length", "damping"};
  for (const auto& item : sys.items()) {
    if ((type != "cartpole" && cartpole_only.contains(item.key())) ||
        (type != "pendulum" && pendulum_only.contains(item.key())) ||
        (type != "cartpole" && type != "pendulum" && item.key() == "gravity")) {
      throw InvalidArgument("config: key 'system." + item.key() +
                            "' does not apply to " + type);
    }
  }
  if (type == "cartpole") {
    CartPoleParams& p = config.system.cartpole;
    Read(sys, "cart_mass", p.cart_mass, "system");
    Read(sys, "pole_mass", p.pole_mass, "system");
    Read(sys, "pole_half_length", p.pole_half_length, "system");
    Read(sys, "gravity", p.gravity, "system");
    Read(sys, "dt", p.dt, "system");
    Read(sys, "cart_friction", p.cart_friction, "system");
    Read(sys, "pole_friction", p.pole_friction, "system");
    Read(sys, "force_limit", p.force_limit, "system");
    p.Validate();
  } else if (type == "pendulum") {
    PendulumParams& p = config.system.pendulum;
    Read(sys, "mass", p.mass, "system");
    Read(sys, "length", p.length, "system");
    Read(sys, "gravity", p.gravity, "system");
    Read(sys, "damping", p.damping, "system");
    Read(sys, "dt", p.dt, "system");
    p.Validate();
  } else {
    Read(sys, "dt", config.system.dt, "system");
  }
  const std::unique_ptr<Dynamics> dynamics = config.system.MakeDynamics();
  const int n = dynamics->StateDim();
  const int m = dynamics->ControlDim();

  const json& cost = doc.contains("cost") ? doc.at("cost") : empty;
  RejectUnknown(cost, {"Q", "R", "Q_T", "x_target", "angle_dims", "u_ref"},
                "cost");
  CostSpec& spec = config.cost;
  if (cost.contains("Q")) spec.Q = ParseMatrix(cost.at("Q"), n, "cost.Q");
  if (cost.contains("R")) spec.R = ParseMatrix(cost.at("R"), m, "cost.R");
  if (cost.contains("Q_T")) {
    spec.Q_T = ParseMatrix(cost.at("Q_T"), n, "cost.Q_T");
  } else if (cost.contains("Q")) {
    spec.Q_T = 10.0 * spec.Q;
  }
  if (cost.contains("x_target")) {
    spec.x_target = ParseVector(cost.at("x_target"), n, "cost.x_target");
  }
  Read(cost, "angle_dims", spec.angle_dims, "cost");
  if (cost.contains("u_ref") && !cost.at("u_ref").is_null()) {
    const json& rows = cost.at("u_ref");
    if (!rows.is_array()) throw InvalidArgument("config: cost.u_ref must be a list");
    ControlSequence u_ref(rows.size(), m);
    for (size_t t = 0; t < rows.size(); ++t) {
      u_ref.row(t) = ParseVector(rows[t], m, "cost.u_ref").transpose();
    }
    spec.u_ref = u_ref;
  }

  const json& ctrl = doc.contains("controller") ? doc.at("controller") : empty;
  RejectUnknown(ctrl, {"num_samples", "horizon", "lambda", "sigma", "num_threads"},
                "controller");
  ControllerConfig& cc = config.controller;
  Read(ctrl, "num_samples", cc.num_samples, "controller");
  Read(ctrl, "horizon", cc.horizon, "controller");
  Read(ctrl, "lambda", cc.lambda, "controller");
  Read(ctrl, "num_threads", cc.num_threads, "controller");
  if (ctrl.contains("sigma")) {
    cc.sigma = ParseVector(ctrl.at("sigma"), m, "controller.sigma");
  }

  const json& svgd = doc.contains("svgd") ? doc.at("svgd") : empty;
  RejectUnknown(svgd,
                {"step_size", "iterations", "bandwidth", "alpha", "squared_norm",
                 "gradient_clip"},
                "svgd");
  SvgdConfig& sc = cc.svgd;
  Read(svgd, "step_size", sc.step_size, "svgd");
  Read(svgd, "iterations", sc.iterations, "svgd");
  Read(svgd, "alpha", sc.alpha, "svgd");
  Read(svgd, "squared_norm", sc.squared_norm, "svgd");
  Read(svgd, "gradient_clip", sc.gradient_clip, "svgd");
  if (svgd.contains("bandwidth")) {
    const json& bw = svgd.at("bandwidth");
    if (bw.is_string()) {
      if (bw.get<std::string>() != "median") {
        throw InvalidArgument("config: svgd.bandwidth must be a number or \"median\"");
      }
      sc.bandwidth_mode = BandwidthMode::kMedian;
    } else if (bw.is_object()) {
      RejectUnknown(bw, {"mode", "fallback"}, "svgd.bandwidth");
      std::string mode = "median";
      Read(bw, "mode", mode, "svgd.bandwidth");
      Read(bw, "fallback", sc.bandwidth, "svgd.bandwidth");
      if (mode != "median" && mode != "fixed") {
        throw InvalidArgument("config: svgd.bandwidth.mode must be median or fixed");
      }
      sc.bandwidth_mode =
          mode == "median" ? BandwidthMode::kMedian : BandwidthMode::kFixed;
    } else {
      sc.bandwidth_mode = BandwidthMode::kFixed;
      Read(svgd, "bandwidth", sc.bandwidth, "svgd");
    }
  }

  const json& exp = doc.contains("experiment") ? doc.at("experiment") : empty;
  RejectUnknown(exp,
                {"algos", "n_trials", "base_seed", "T_total", "x0", "output_dir",
                 "trial_threads", "record_wall_time", "metrics"},
                "experiment");
  if (exp.contains("algos")) {
    std::vector<std::string> names;
    Read(exp, "algos", names, "experiment");
    config.algos.clear();
    for (const std::string& name : names) config.algos.push_back(ParseAlgorithm(name));
  }
  Read(exp, "n_trials", config.n_trials, "experiment");
  Read(exp, "base_seed", config.base_seed, "experiment");
  Read(exp, "T_total", config.t_total, "experiment");
  Read(exp, "trial_threads", config.trial_threads, "experiment");
  Read(exp, "record_wall_time", config.record_wall_time, "experiment");
  if (exp.contains("x0")) config.x0 = ParseVector(exp.at("x0"), n, "experiment.x0");
  if (exp.contains("output_dir")) {
    config.output_dir = exp.at("output_dir").get<std::string>();
  }
  if (exp.contains("metrics")) {
    const json& list = exp.at("metrics");
    if (!list.is_array()) {
      throw InvalidArgument("config: experiment.metrics must be a list");
    }
    config.metrics.clear();
    for (const json& item : list) config.metrics.push_back(ParseMetric(item));
  }

  config.Validate();
  return config;
}

ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("config: cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument("config: " + path.string() + ": " + e.what());
  }
  return ParseExperimentConfig(doc);
}

json ToJson(const ExperimentConfig& config) {
  json sys = {{"type", config.system.type}};
  if (config.system.type == "cartpole") {
    const CartPoleParams& p = config.system.cartpole;
    sys.update({{"cart_mass", p.cart_mass},
                {"pole_mass", p.pole_mass},
                {"pole_half_length", p.pole_half_length},
                {"gravity", p.gravity},
                {"dt", p.dt},
                {"cart_friction", p.cart_friction},
                {"pole_friction", p.pole_friction},
                {"force_limit", p.force_limit}});
  } else if (config.system.type == "pendulum") {
    const PendulumParams& p = config.system.pendulum;
    sys.update({{"mass", p.mass},
                {"length", p.length},
                {"gravity", p.gravity},
                {"damping", p.damping},
                {"dt", p.dt}});
  } else {
    sys["dt"] = config.system.dt;
  }

  const CostSpec& spec = config.cost;
  json cost = {{"Q", MatrixToJson(spec.Q)},
               {"R", MatrixToJson(spec.R)},
               {"Q_T", MatrixToJson(spec.Q_T)},
               {"x_target", VectorToJson(spec.x_target)},
               {"angle_dims", spec.angle_dims}};
  if (spec.u_ref) cost["u_ref"] = MatrixToJson(*spec.u_ref);

  const ControllerConfig& cc = config.controller;
  json ctrl = {{"num_samples", cc.num_samples},
               {"horizon", cc.horizon},
               {"lambda", cc.lambda},
               {"sigma", VectorToJson(cc.sigma)},
               {"num_threads", cc.num_threads}};

  const SvgdConfig& sc = cc.svgd;
  json svgd = {{"step_size", sc.step_size},
               {"iterations", sc.iterations},
               {"alpha", sc.alpha},
               {"squared_norm", sc.squared_norm},
               {"gradient_clip", sc.gradient_clip}};
  if (sc.bandwidth_mode == BandwidthMode::kMedian) {
    svgd["bandwidth"] = {{"mode", "median"}, {"fallback", sc.bandwidth}};
  } else {
    svgd["bandwidth"] = sc.bandwidth;
  }

  json algos = json::array();
  for (Algorithm algo : config.algos) algos.push_back(AlgorithmName(algo));
  json metrics = json::array();
  for (const MetricSpec& metric : config.metrics) {
    metrics.push_back(MetricToJson(metric));
  }
  json exp = {{"algos", algos},
              {"n_trials", config.n_trials},
              {"base_seed", config.base_seed},
              {"T_total", config.t_total},
              {"x0", VectorToJson(config.x0)},
              {"output_dir", config.output_dir.string()},
              {"trial_threads", config.trial_threads},
              {"record_wall_time", config.record_wall_time},
              {"metrics", metrics}};

  return {{"system", sys},
          {"cost", cost},
          {"controller", ctrl},
          {"svgd", svgd},
          {"experiment", exp}};
}

}  // namespace soppi
