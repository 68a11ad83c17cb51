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

#include "soppi/records.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace soppi {
namespace {

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::ofstream OpenForWrite(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string StripCr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::string FormatDouble(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                    std::chars_format::general, 17);
  return std::string(buffer, result.ptr);
}

double ParseDouble(const std::string& text) {
  if (text == "nan") return std::nan("");
  if (text == "inf") return INFINITY;
  if (text == "-inf") return -INFINITY;
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto result = std::from_chars(text.data(), end, value);
  if (result.ec != std::errc() || result.ptr != end) {
    throw InvalidArgument("csv: cannot parse number '" + text + "'");
  }
  return value;
}

void WriteRecordCsv(std::ostream& out, const TrialRecord& record,
                    bool include_wall_time) {
  record.Validate();
  const int n = static_cast<int>(record.states[0].size());
  const int m = record.controls.empty() ? 0 : static_cast<int>(record.controls[0].size());
  out << "t";
  for (int i = 0; i < n; ++i) out << ",state_" << i;
  for (int j = 0; j < m; ++j) out << ",u_" << j;
  out << ",wall_ms\n";
  for (int r = 0; r < record.num_states(); ++r) {
    out << FormatDouble(record.times[r]);
    for (int i = 0; i < n; ++i) out << ',' << FormatDouble(record.states[r][i]);
    const bool has_control = r < static_cast<int>(record.controls.size());
    for (int j = 0; j < m; ++j) {
      out << ',';
      if (has_control) out << FormatDouble(record.controls[r][j]);
    }
    out << ',';
    if (has_control) {
      out << FormatDouble(include_wall_time ? record.step_wall_times[r] * 1e3
                                            : 0.0);
    }
    out << '\n';
  }
}

void WriteRecordCsv(const std::filesystem::path& path, const TrialRecord& record,
                    bool include_wall_time) {
  std::ofstream out = OpenForWrite(path);
  WriteRecordCsv(out, record, include_wall_time);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

TrialRecord ReadRecordCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("record csv: empty input");
  const std::vector<std::string> header = SplitCsvLine(StripCr(line));
  if (header.size() < 3 || header.front() != "t" || header.back() != "wall_ms") {
    throw InvalidArgument("record csv: unexpected header");
  }
  int n = 0;
  int m = 0;
  for (size_t c = 1; c + 1 < header.size(); ++c) {
    if (header[c] == "state_" + std::to_string(n) && m == 0) {
      ++n;
    } else if (header[c] == "u_" + std::to_string(m)) {
      ++m;
    } else {
      throw InvalidArgument("record csv: unexpected column '" + header[c] + "'");
    }
  }

  TrialRecord record;
  bool finished = false;
  while (std::getline(in, line)) {
    line = StripCr(line);
    if (line.empty()) continue;
    if (finished) throw InvalidArgument("record csv: rows after the final state");
    const std::vector<std::string> fields = SplitCsvLine(line);
    if (fields.size() != header.size()) {
      throw InvalidArgument("record csv: row has " + std::to_string(fields.size()) +
                            " fields, expected " + std::to_string(header.size()));
    }
    record.times.push_back(ParseDouble(fields[0]));
    State x(n);
    for (int i = 0; i < n; ++i) x[i] = ParseDouble(fields[1 + i]);
    record.states.push_back(x);
    if (fields.back().empty()) {
      finished = true;
      continue;
    }
    Control u(m);
    for (int j = 0; j < m; ++j) u[j] = ParseDouble(fields[1 + n + j]);
    record.controls.push_back(u);
    record.step_wall_times.push_back(ParseDouble(fields.back()) * 1e-3);
  }
  record.Validate();
  return record;
}

TrialRecord ReadRecordCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  return ReadRecordCsv(in);
}

void WriteSummaryCsv(const std::filesystem::path& path,
                     const std::vector<AlgoSummary>& summaries) {
  std::ofstream out = OpenForWrite(path);
  out << "algo,metric,mean,std,median,n,n_nonconverged\n";
  for (const AlgoSummary& summary : summaries) {
    for (const SummaryRow& row : summary.rows) {
      out << summary.algo << ',' << row.metric << ',' << FormatDouble(row.mean)
          << ',' << FormatDouble(row.std) << ',' << FormatDouble(row.median)
          << ',' << row.n << ',' << row.n_nonconverged << '\n';
    }
  }
}

void WritePValueCsv(const std::filesystem::path& path,
                    const std::vector<PValueRow>& rows) {
  std::ofstream out = OpenForWrite(path);
  out << "metric,algo_a,algo_b,t,dof,p_value,note\n";
  for (const PValueRow& row : rows) {
    out << row.metric << ',' << row.algo_a << ',' << row.algo_b << ','
        << FormatDouble(row.welch.t) << ',' << FormatDouble(row.welch.dof) << ','
        << FormatDouble(row.welch.p) << ',' << row.note << '\n';
  }
}

std::vector<std::filesystem::path> EmitPlotData(
    const std::vector<std::pair<std::string, TrialRecord>>& records,
    const std::filesystem::path& out_dir) {
  std::vector<std::filesystem::path> written;
  for (const auto& [name, record] : records) {
    record.Validate();
    const std::filesystem::path dir = out_dir / name;
    const int n = static_cast<int>(record.states[0].size());
    const int m = record.controls.empty() ? 0 : static_cast<int>(record.controls[0].size());
    auto write = [&](const std::string& signal, int rows, auto&& value) {
      const std::filesystem::path path = dir / (signal + ".csv");
      std::ofstream out = OpenForWrite(path);
      out << "t," << signal << '\n';
      for (int r = 0; r < rows; ++r) {
        out << FormatDouble(record.times[r]) << ',' << FormatDouble(value(r)) << '\n';
      }
      written.push_back(path);
    };
    for (int i = 0; i < n; ++i) {
      write("state_" + std::to_string(i), record.num_states(),
            [&](int r) { return record.states[r][i]; });
    }
    const int steps = static_cast<int>(record.controls.size());
    for (int j = 0; j < m; ++j) {
      write("u_" + std::to_string(j), steps,
            [&](int r) { return record.controls[r][j]; });
    }
    write("wall_ms", steps, [&](int r) { return record.step_wall_times[r] * 1e3; });
  }
  return written;
}

PlotSeries ReadPlotSeries(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("plot csv: empty file");
  const std::vector<std::string> header = SplitCsvLine(StripCr(line));
  if (header.size() != 2 || header[0] != "t") {
    throw InvalidArgument("plot csv: unexpected header in " + path.string());
  }
  PlotSeries series{header[1], {}, {}};
  while (std::getline(in, line)) {
    line = StripCr(line);
    if (line.empty()) continue;
    const std::vector<std::string> fields = SplitCsvLine(line);
    if (fields.size() != 2) throw InvalidArgument("plot csv: malformed row");
    series.times.push_back(ParseDouble(fields[0]));
    series.values.push_back(ParseDouble(fields[1]));
  }
  return series;
}

}  // namespace soppi
