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

#include "soppi/experiment.h"

#include <chrono>
#include <ctime>
#include <exception>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <utility>

#include "soppi/controller.h"
#include "soppi/thread_pool.h"

#ifndef SOPPI_VERSION
#define SOPPI_VERSION "unknown"
#endif

namespace soppi {
namespace {

using nlohmann::json;

constexpr int kManifestVersion = 1;

std::string UtcNow() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

void WriteManifest(const std::filesystem::path& dir, const RunManifest& manifest) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "manifest.json");
  out << manifest.ToJson().dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write manifest in " + dir.string());
}

void WriteSummaryFiles(const std::filesystem::path& dir,
                       const ExperimentSummary& summary) {
  WriteSummaryCsv(dir / "summary.csv", summary.summaries);
  WritePValueCsv(dir / "pvalues.csv", summary.p_values);
}

std::vector<std::string> AlgoNames(const ExperimentConfig& config) {
  std::vector<std::string> names;
  for (Algorithm algo : config.algos) names.push_back(AlgorithmName(algo));
  return names;
}

}  // namespace

std::string CodeVersion() { return std::string("soppi ") + SOPPI_VERSION; }

json RunManifest::ToJson() const {
  json trial_list = json::array();
  for (const TrialEntry& t : trials) {
    trial_list.push_back({{"trial", t.trial},
                          {"algo", t.algo},
                          {"seed", t.seed},
                          {"record_file", t.record_file},
                          {"status", t.status},
                          {"error", t.error},
                          {"wall_seconds", t.wall_seconds}});
  }
  return {{"manifest_version", kManifestVersion},
          {"code_version", code_version},
          {"config", config},
          {"trials", trial_list},
          {"started", started},
          {"finished", finished},
          {"complete", complete}};
}

RunManifest RunManifest::FromJson(const json& doc) {
  if (!doc.is_object() || !doc.contains("manifest_version")) {
    throw InvalidArgument("manifest: missing manifest_version");
  }
  RunManifest manifest;
  manifest.code_version = doc.value("code_version", "");
  manifest.config = doc.at("config");
  manifest.started = doc.value("started", "");
  manifest.finished = doc.value("finished", "");
  manifest.complete = doc.value("complete", false);
  for (const json& t : doc.at("trials")) {
    TrialEntry entry;
    entry.trial = t.at("trial").get<int>();
    entry.algo = t.at("algo").get<std::string>();
    entry.seed = t.at("seed").get<uint64_t>();
    entry.record_file = t.at("record_file").get<std::string>();
    entry.status = t.at("status").get<std::string>();
    entry.error = t.value("error", "");
    entry.wall_seconds = t.value("wall_seconds", 0.0);
    manifest.trials.push_back(entry);
  }
  return manifest;
}

uint64_t TrialSeed(const ExperimentConfig& config, int trial) {
  return config.base_seed + static_cast<uint64_t>(trial);
}

RunManifest RunExperiment(const ExperimentConfig& config) {
  config.Validate();
  const std::filesystem::path dir = config.output_dir;
  std::filesystem::create_directories(dir / "records");

  RunManifest manifest;
  manifest.config = ToJson(config);
  manifest.code_version = CodeVersion();
  manifest.started = UtcNow();
  for (int i = 0; i < config.n_trials; ++i) {
    for (Algorithm algo : config.algos) {
      TrialEntry entry;
      entry.trial = i;
      entry.algo = AlgorithmName(algo);
      entry.seed = TrialSeed(config, i);
      entry.record_file =
          "records/" + entry.algo + "_trial" + std::to_string(i) + ".csv";
      manifest.trials.push_back(entry);
    }
  }
  WriteManifest(dir, manifest);

  const std::unique_ptr<Dynamics> dynamics = config.system.MakeDynamics();
  const int num_steps = config.NumSteps();
  std::unique_ptr<ThreadPool> pool;
  if (config.trial_threads != 1) {
    pool = std::make_unique<ThreadPool>(config.trial_threads);
  }
  std::vector<std::optional<TrialRecord>> records(manifest.trials.size());

  ParallelFor(pool.get(), static_cast<int>(manifest.trials.size()), [&](int job) {
    TrialEntry& entry = manifest.trials[job];
    const auto start = std::chrono::steady_clock::now();
    try {
      ControllerConfig cc = config.controller;
      cc.seed = entry.seed;
      const Controller controller(*dynamics, config.cost, cc);
      TrialRecord record =
          controller.RunEpisode(config.x0, ParseAlgorithm(entry.algo), num_steps);
      WriteRecordCsv(dir / entry.record_file, record, config.record_wall_time);
      records[job] = std::move(record);
      entry.status = "ok";
    } catch (const std::exception& e) {
      entry.status = "failed";
      entry.error = e.what();
    }
    entry.wall_seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  });

  std::map<std::string, std::vector<TrialRecord>> by_algo;
  manifest.complete = true;
  for (size_t job = 0; job < manifest.trials.size(); ++job) {
    if (records[job]) {
      by_algo[manifest.trials[job].algo].push_back(std::move(*records[job]));
    } else {
      manifest.complete = false;
    }
  }
  WriteSummaryFiles(dir, SummarizeRecords(by_algo, AlgoNames(config), config.metrics));
  manifest.finished = UtcNow();
  WriteManifest(dir, manifest);
  return manifest;
}

RunManifest ReadManifest(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw InvalidArgument("no manifest.json in " + dir.string());
  return RunManifest::FromJson(json::parse(in));
}

std::map<std::string, std::vector<TrialRecord>> LoadRecords(
    const std::filesystem::path& dir, const RunManifest& manifest) {
  std::map<std::string, std::vector<TrialRecord>> by_algo;
  for (const TrialEntry& entry : manifest.trials) {
    if (entry.status != "ok") continue;
    by_algo[entry.algo].push_back(ReadRecordCsv(dir / entry.record_file));
  }
  return by_algo;
}

ExperimentSummary SummarizeRecords(
    const std::map<std::string, std::vector<TrialRecord>>& records,
    const std::vector<std::string>& algo_order,
    const std::vector<MetricSpec>& metrics) {
  ExperimentSummary summary;
  // values[algo][metric] over trials
  std::map<std::string, std::vector<std::vector<std::optional<double>>>> values;
  for (const std::string& algo : algo_order) {
    auto it = records.find(algo);
    if (it == records.end()) continue;
    AlgoSummary algo_summary{algo, {}};
    auto& per_metric = values[algo];
    for (const MetricSpec& metric : metrics) {
      std::vector<std::optional<double>> column;
      for (const TrialRecord& record : it->second) {
        column.push_back(EvaluateMetric(record, metric));
      }
      algo_summary.rows.push_back(SummarizeValues(metric.name, column));
      per_metric.push_back(std::move(column));
    }
    summary.summaries.push_back(std::move(algo_summary));
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (size_t mi = 0; mi < metrics.size(); ++mi) {
    for (const std::string& a : algo_order) {
      for (const std::string& b : algo_order) {
        if (a == b || !values.contains(a) || !values.contains(b)) continue;
        auto converged = [&](const std::string& algo) {
          std::vector<double> out;
          for (const std::optional<double>& v : values[algo][mi]) {
            if (v) out.push_back(*v);
          }
          return out;
        };
        PValueRow row{metrics[mi].name, a, b, {nan, nan, nan}, ""};
        try {
          row.welch = WelchTTestOneTailed(converged(a), converged(b));
        } catch (const InvalidArgument& e) {
          row.note = e.what();
          for (char& c : row.note) {
            if (c == ',') c = ';';
          }
        }
        summary.p_values.push_back(row);
      }
    }
  }
  return summary;
}

ExperimentSummary SummarizeDirectory(const std::filesystem::path& dir) {
  const RunManifest manifest = ReadManifest(dir);
  const ExperimentConfig config = ParseExperimentConfig(manifest.config);
  const ExperimentSummary summary =
      SummarizeRecords(LoadRecords(dir, manifest), AlgoNames(config), config.metrics);
  WriteSummaryFiles(dir, summary);
  return summary;
}

std::vector<std::filesystem::path> PlotDataDirectory(
    const std::filesystem::path& in_dir, const std::filesystem::path& out_dir) {
  const RunManifest manifest = ReadManifest(in_dir);
  std::vector<std::pair<std::string, TrialRecord>> records;
  for (const TrialEntry& entry : manifest.trials) {
    if (entry.status != "ok") continue;
    records.emplace_back(std::filesystem::path(entry.record_file).stem().string(),
                         ReadRecordCsv(in_dir / entry.record_file));
  }
  return EmitPlotData(records, out_dir);
}

}  // namespace soppi
