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

#ifndef SOPPI_EXPERIMENT_H_
#define SOPPI_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "soppi/config.h"
#include "soppi/records.h"

namespace soppi {

// Version string stamped into manifests.
std::string CodeVersion();

struct TrialEntry {
  int trial = 0;
  std::string algo;
  uint64_t seed = 0;
  std::string record_file;  // relative to the output directory
  std::string status = "pending";  // "ok", "failed" or "pending"
  std::string error;
  double wall_seconds = 0.0;
};

// Everything needed to rerun an experiment bit-for-bit.
struct RunManifest {
  nlohmann::json config;
  std::string code_version;
  std::vector<TrialEntry> trials;
  std::string started;
  std::string finished;
  bool complete = false;

  nlohmann::json ToJson() const;
  static RunManifest FromJson(const nlohmann::json& doc);
};

// Paired seeding: trial i uses seed base_seed + i for every algorithm.
uint64_t TrialSeed(const ExperimentConfig& config, int trial);

// Runs every (trial, algo) pair, writing records/<algo>_trial<i>.csv, then
// summary.csv, pvalues.csv and manifest.json under config.output_dir. A
// failing trial is recorded in the manifest (complete = false); the others
// still run and are summarized.
RunManifest RunExperiment(const ExperimentConfig& config);

// Reads the manifest and the record files in `dir`.
RunManifest ReadManifest(const std::filesystem::path& dir);
std::map<std::string, std::vector<TrialRecord>> LoadRecords(
    const std::filesystem::path& dir, const RunManifest& manifest);

struct ExperimentSummary {
  std::vector<AlgoSummary> summaries;
  std::vector<PValueRow> p_values;
};

// Per-algorithm statistics plus one-tailed Welch tests for every ordered
// algorithm pair and metric, over the converged trials of each group.
ExperimentSummary SummarizeRecords(
    const std::map<std::string, std::vector<TrialRecord>>& records,
    const std::vector<std::string>& algo_order,
    const std::vector<MetricSpec>& metrics);

// Rebuilds summary.csv and pvalues.csv in `dir` from its records.
ExperimentSummary SummarizeDirectory(const std::filesystem::path& dir);

// Writes plot series for every record listed in the manifest in `in_dir`.
std::vector<std::filesystem::path> PlotDataDirectory(
    const std::filesystem::path& in_dir, const std::filesystem::path& out_dir);

}  // namespace soppi

#endif  // SOPPI_EXPERIMENT_H_
