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

#ifndef SOPPI_RECORDS_H_
#define SOPPI_RECORDS_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "soppi/metrics.h"

namespace soppi {

// Shortest text that reads back as the same double (17 significant digits).
std::string FormatDouble(double value);
double ParseDouble(const std::string& text);

// Record CSV: header `t,state_0..state_{n-1},u_0..u_{m-1},wall_ms`, one row
// per recorded state. The last row has empty control and wall_ms fields
// because no control follows the final state. With include_wall_time false
// every wall_ms is written as 0.
void WriteRecordCsv(std::ostream& out, const TrialRecord& record,
                    bool include_wall_time = true);
void WriteRecordCsv(const std::filesystem::path& path, const TrialRecord& record,
                    bool include_wall_time = true);
TrialRecord ReadRecordCsv(std::istream& in);
TrialRecord ReadRecordCsv(const std::filesystem::path& path);

struct AlgoSummary {
  std::string algo;
  std::vector<SummaryRow> rows;
};

struct PValueRow {
  std::string metric;
  std::string algo_a;
  std::string algo_b;
  WelchResult welch;  // NaN fields when the test is undefined
  std::string note;   // why the test was skipped, if it was
};

// `algo,metric,mean,std,median,n,n_nonconverged`
void WriteSummaryCsv(const std::filesystem::path& path,
                     const std::vector<AlgoSummary>& summaries);
// `metric,algo_a,algo_b,t,dof,p_value,note`; p_value is the one-tailed
// probability behind "algo_a better (smaller) than algo_b".
void WritePValueCsv(const std::filesystem::path& path,
                    const std::vector<PValueRow>& rows);

// One `t,<signal>` file per record and signal under out_dir/<name>/, for
// signals state_i, u_j and wall_ms. Returns the files written.
std::vector<std::filesystem::path> EmitPlotData(
    const std::vector<std::pair<std::string, TrialRecord>>& records,
    const std::filesystem::path& out_dir);

struct PlotSeries {
  std::string signal;
  std::vector<double> times;
  std::vector<double> values;
};
PlotSeries ReadPlotSeries(const std::filesystem::path& path);

}  // namespace soppi

#endif  // SOPPI_RECORDS_H_
