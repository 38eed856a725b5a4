// Copyright 2026 The codecwb Authors
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


#pragma once

#include <codecwb/metrics.hpp>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace codecwb::cli {

// One (model, strategy) row of the comparison grid. Values are EER
// percentages; CSV input carries them at three decimals.
struct ReportRow {
  std::string model;
  std::string strategy;
  std::vector<std::pair<std::string, double>> conditions;
  double cavg = 0.0;
  double avg = 0.0;

  std::optional<double> find(const std::string& condition) const;
};

ReportRow row_from_report(const EvalReport& r);

// A report JSON file contributes one row; a CSV written by format_csv
// contributes all of its rows.
std::vector<ReportRow> load_rows(const std::filesystem::path& path);
std::vector<ReportRow> parse_rows_csv(const std::string& text, const std::string& source);

// Columns are the conditions in order of first appearance, then CAVG, AVG.
std::vector<std::string> grid_columns(const std::vector<ReportRow>& rows);
std::string format_table(const std::vector<ReportRow>& rows);
std::string format_csv(const std::vector<ReportRow>& rows);

std::string percent3(double percent);

}  // namespace codecwb::cli
