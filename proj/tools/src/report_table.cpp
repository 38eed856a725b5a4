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


#include "report_table.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

namespace codecwb::cli {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_percent(const std::string& cell, const std::string& source, int line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw FormatError(source + ":" + std::to_string(line) + ": bad EER value '" + cell + "'");
  }
  return v;
}

}  // namespace

std::optional<double> ReportRow::find(const std::string& condition) const {
  for (const auto& [name, value] : conditions) {
    if (name == condition) return value;
  }
  return std::nullopt;
}

std::string percent3(double percent) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", percent);
  return buf;
}

ReportRow row_from_report(const EvalReport& r) {
  ReportRow row{r.model, r.strategy, {}, 100.0 * r.aggregates.cavg, 100.0 * r.aggregates.avg};
  for (const auto& c : r.conditions) row.conditions.emplace_back(c.condition, 100.0 * c.eer.eer);
  return row;
}

std::vector<ReportRow> parse_rows_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FormatError(source + ": empty report CSV");
  const auto header = split_csv_line(line);
  if (header.size() < 4 || header[0] != "model" || header[1] != "strategy" ||
      header[header.size() - 2] != "CAVG" || header.back() != "AVG") {
    throw FormatError(source + ": header must be model,strategy,<conditions...>,CAVG,AVG");
  }
  std::vector<ReportRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw FormatError(source + ":" + std::to_string(lineno) + ": expected " +
                        std::to_string(header.size()) + " fields");
    }
    ReportRow row{cells[0], cells[1], {}, 0.0, 0.0};
    for (std::size_t i = 2; i + 2 < cells.size(); ++i) {
      if (cells[i].empty()) continue;  // condition absent from this row
      row.conditions.emplace_back(header[i], parse_percent(cells[i], source, lineno));
    }
    row.cavg = parse_percent(cells[cells.size() - 2], source, lineno);
    row.avg = parse_percent(cells.back(), source, lineno);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ReportRow> load_rows(const std::filesystem::path& path) {
  if (path.extension() == ".csv") {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string() + ": cannot open");
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return parse_rows_csv(text, path.string());
  }
  return {row_from_report(load_report(path))};
}

std::vector<std::string> grid_columns(const std::vector<ReportRow>& rows) {
  std::vector<std::string> cols;
  for (const auto& r : rows) {
    for (const auto& [name, value] : r.conditions) {
      if (std::find(cols.begin(), cols.end(), name) == cols.end()) cols.push_back(name);
    }
  }
  return cols;
}

std::string format_csv(const std::vector<ReportRow>& rows) {
  const auto cols = grid_columns(rows);
  std::string out = "model,strategy";
  for (const auto& c : cols) out += "," + c;
  out += ",CAVG,AVG\n";
  for (const auto& r : rows) {
    out += r.model + "," + r.strategy;
    for (const auto& c : cols) {
      const auto v = r.find(c);
      out += "," + (v ? percent3(*v) : std::string());
    }
    out += "," + percent3(r.cavg) + "," + percent3(r.avg) + "\n";
  }
  return out;
}

std::string format_table(const std::vector<ReportRow>& rows) {
  auto cols = grid_columns(rows);
  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> head{"model", "strategy"};
  head.insert(head.end(), cols.begin(), cols.end());
  head.push_back("CAVG");
  head.push_back("AVG");
  grid.push_back(head);
  for (const auto& r : rows) {
    std::vector<std::string> cells{r.model, r.strategy};
    for (const auto& c : cols) {
      const auto v = r.find(c);
      cells.push_back(v ? percent3(*v) : "-");
    }
    cells.push_back(percent3(r.cavg));
    cells.push_back(percent3(r.avg));
    grid.push_back(std::move(cells));
  }
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& row : grid) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::string out;
  for (const auto& row : grid) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      // Text columns left-aligned, numbers right-aligned.
      const std::string pad(width[i] - row[i].size(), ' ');
      out += i < 2 ? row[i] + pad : pad + row[i];
      out += i + 1 < row.size() ? "  " : "\n";
    }
  }
  return out;
}

}  // namespace codecwb::cli
