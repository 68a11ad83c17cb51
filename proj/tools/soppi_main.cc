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

// Command-line driver: run experiments, rebuild summaries, emit plot data.

#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "soppi/config.h"
#include "soppi/experiment.h"

namespace {

// Accepts either an experiment config or a manifest.json from an earlier run.
soppi::ExperimentConfig LoadConfigOrManifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw soppi::InvalidArgument("cannot open " + path);
  const nlohmann::json doc = nlohmann::json::parse(in);
  if (doc.is_object() && doc.contains("manifest_version")) {
    return soppi::ParseExperimentConfig(doc.at("config"));
  }
  return soppi::ParseExperimentConfig(doc);
}

void PrintSummary(const soppi::ExperimentSummary& summary) {
  for (const soppi::AlgoSummary& algo : summary.summaries) {
    for (const soppi::SummaryRow& row : algo.rows) {
      std::cout << algo.algo << "  " << row.metric << "  mean=" << row.mean
                << " std=" << row.std << " median=" << row.median
                << " n=" << row.n << " nonconverged=" << row.n_nonconverged
                << "\n";
    }
  }
  for (const soppi::PValueRow& row : summary.p_values) {
    std::cout << row.metric << "  " << row.algo_a << " < " << row.algo_b
              << "  p=" << row.welch.p;
    if (!row.note.empty()) std::cout << "  (" << row.note << ")";
    std::cout << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sampling-based MPC experiments (MPPI / SOPPI)"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> algo;
  std::optional<int> trials;
  std::optional<uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> threads;
  std::optional<std::string> system;
  CLI::App* run = app.add_subcommand("run", "run an experiment");
  run->add_option("--config", config_path, "config JSON or manifest.json");
  run->add_option("--system", system, "built-in defaults when no config is given")
      ->check(CLI::IsMember({"cartpole", "pendulum", "double_integrator",
                             "double_integrator_2d"}));
  run->add_option("--algo", algo, "run only this algorithm")
      ->check(CLI::IsMember({"mppi", "soppi"}));
  run->add_option("--trials", trials, "number of paired trials")
      ->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "base seed");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--threads", threads, "concurrent trials (0 = all cores)");

  std::string in_dir;
  CLI::App* summarize =
      app.add_subcommand("summarize", "recompute summary.csv and pvalues.csv");
  summarize->add_option("--in", in_dir, "run directory")->required();

  std::string plot_in;
  std::string plot_out;
  CLI::App* plot = app.add_subcommand("plotdata", "write per-signal series");
  plot->add_option("--in", plot_in, "run directory")->required();
  plot->add_option("--out", plot_out, "destination directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      soppi::ExperimentConfig config =
          config_path.empty()
              ? soppi::DefaultExperimentConfig(system.value_or("cartpole"))
              : LoadConfigOrManifest(config_path);
      if (algo) config.algos = {soppi::ParseAlgorithm(*algo)};
      if (trials) config.n_trials = *trials;
      if (seed) config.base_seed = *seed;
      if (out_dir) config.output_dir = *out_dir;
      if (threads) config.trial_threads = *threads;
      const soppi::RunManifest manifest = soppi::RunExperiment(config);
      for (const soppi::TrialEntry& t : manifest.trials) {
        std::cout << t.algo << " trial " << t.trial << " seed " << t.seed << ": "
                  << t.status << " (" << t.wall_seconds << " s)";
        if (!t.error.empty()) std::cout << " " << t.error;
        std::cout << "\n";
      }
      PrintSummary(soppi::SummarizeDirectory(config.output_dir));
      std::cout << "results in " << config.output_dir.string() << "\n";
      return manifest.complete ? 0 : 2;
    }
    if (*summarize) {
      PrintSummary(soppi::SummarizeDirectory(in_dir));
      return 0;
    }
    if (*plot) {
      const auto files = soppi::PlotDataDirectory(plot_in, plot_out);
      std::cout << "wrote " << files.size() << " files to " << plot_out << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
