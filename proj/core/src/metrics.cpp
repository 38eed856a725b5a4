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

#include "codecwb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace codecwb {
namespace {

void check_scores(std::span<const double> s, const char* side) {
  if (s.empty()) throw InvalidArgument(std::string("compute_eer: no ") + side + " scores");
  for (double v : s) {
    if (!std::isfinite(v)) {
      throw InvalidArgument(std::string("compute_eer: non-finite ") + side + " score");
    }
  }
}

}  // namespace

EerResult compute_eer(std::span<const double> bonafide,
                      std::span<const double> spoof) {
  check_scores(bonafide, "bonafide");
  check_scores(spoof, "spoof");
  std::vector<double> bona(bonafide.begin(), bonafide.end());
  std::vector<double> fake(spoof.begin(), spoof.end());
  std::sort(bona.begin(), bona.end());
  std::sort(fake.begin(), fake.end());
  std::vector<double> candidates;
  candidates.reserve(bona.size() + fake.size());
  std::merge(bona.begin(), bona.end(), fake.begin(), fake.end(),
             std::back_inserter(candidates));
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  const auto nb = static_cast<std::int64_t>(bona.size());
  const auto ns = static_cast<std::int64_t>(fake.size());
  std::size_t ib = 0, is = 0;
  std::int64_t best_a = 0, best_b = 0;
  __int128 best_gap = -1;
  double best_t = 0.0;
  for (double t : candidates) {
    while (ib < bona.size() && bona[ib] < t) ++ib;
    while (is < fake.size() && fake[is] < t) ++is;
    const auto a = static_cast<std::int64_t>(ib);       // bonafide rejected
    const auto b = ns - static_cast<std::int64_t>(is);  // spoof accepted
    // |a/nb - b/ns| scaled by nb*ns.
    __int128 gap = static_cast<__int128>(a) * ns - static_cast<__int128>(b) * nb;
    if (gap < 0) gap = -gap;
    if (best_gap < 0 || gap < best_gap) {
      best_gap = gap;
      best_a = a;
      best_b = b;
      best_t = t;
    }
  }
  EerResult r;
  r.frr = static_cast<double>(best_a) / static_cast<double>(nb);
  r.far = static_cast<double>(best_b) / static_cast<double>(ns);
  r.eer = 0.5 * (r.frr + r.far);
  r.threshold = best_t;
  return r;
}

Confusion confusion_matrix(std::span<const double> scores,
                           std::span<const Label> labels, double threshold) {
  if (scores.size() != labels.size()) {
    throw InvalidArgument("confusion_matrix: scores and labels differ in length");
  }
  if (scores.empty()) throw InvalidArgument("confusion_matrix: empty input");
  Confusion c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted_bona = scores[i] >= threshold;
    if (labels[i] == Label::kBonafide) {
      ++(predicted_bona ? c.tp : c.fn);
    } else {
      ++(predicted_bona ? c.fp : c.tn);
    }
  }
  return c;
}

Aggregates aggregate(std::span<const ConditionEer> eers,
                     std::span<const std::string> codec_conditions) {
  if (eers.empty()) throw InvalidArgument("aggregate: no conditions");
  Aggregates out;
  double sum = 0.0;
  for (const auto& e : eers) sum += e.eer;
  out.avg = sum / static_cast<double>(eers.size());
  if (!codec_conditions.empty()) {
    double codec_sum = 0.0;
    for (const auto& tag : codec_conditions) {
      auto it = std::find_if(eers.begin(), eers.end(),
                             [&](const ConditionEer& e) { return e.condition == tag; });
      if (it == eers.end()) {
        throw InvalidArgument("aggregate: codec condition '" + tag + "' missing");
      }
      codec_sum += it->eer;
    }
    out.cavg = codec_sum / static_cast<double>(codec_conditions.size());
  }
  return out;
}

std::string format_percent(double fraction) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", 100.0 * fraction);
  return buf;
}

void EvalReport::finalize() {
  std::vector<ConditionEer> eers;
  for (const auto& c : conditions) eers.push_back({c.condition, c.eer.eer});
  aggregates = aggregate(eers, codec_conditions);
}

nlohmann::json to_json(const EvalReport& r) {
  using nlohmann::json;
  json conditions = json::array();
  for (const auto& c : r.conditions) {
    conditions.push_back({
        {"condition", c.condition},
        {"method", c.method},
        {"eer_percent", format_percent(c.eer.eer)},
        {"eer", c.eer.eer},
        {"eer_threshold", c.eer.threshold},
        {"frr", c.eer.frr},
        {"far", c.eer.far},
        {"n_bonafide", c.n_bonafide},
        {"n_spoof", c.n_spoof},
        {"confusion",
         {{"threshold", 0.5}, {"tp", c.confusion.tp}, {"fn", c.confusion.fn},
          {"fp", c.confusion.fp}, {"tn", c.confusion.tn}}},
    });
  }
  return json{
      {"report_version", r.report_version},
      {"orientation", "bonafide-positive; score = P(bonafide); higher = more bonafide"},
      {"seed", r.seed},
      {"checkpoint", r.checkpoint_id},
      {"model", r.model},
      {"strategy", r.strategy},
      {"conditions", conditions},
      {"codec_conditions", r.codec_conditions},
      {"aggregates",
       {{"cavg_percent", format_percent(r.aggregates.cavg)},
        {"cavg", r.aggregates.cavg},
        {"avg_percent", format_percent(r.aggregates.avg)},
        {"avg", r.aggregates.avg}}},
  };
}

EvalReport report_from_json(const nlohmann::json& j, const std::string& source) {
  try {
    EvalReport r;
    r.report_version = j.at("report_version").get<int>();
    if (r.report_version != kReportVersion) {
      throw VersionError(source + ": report version " + std::to_string(r.report_version) +
                         ", expected " + std::to_string(kReportVersion));
    }
    r.seed = j.at("seed").get<std::uint64_t>();
    r.checkpoint_id = j.at("checkpoint").get<std::string>();
    r.model = j.at("model").get<std::string>();
    r.strategy = j.at("strategy").get<std::string>();
    for (const auto& c : j.at("conditions")) {
      ConditionResult cr;
      cr.condition = c.at("condition").get<std::string>();
      cr.method = c.at("method").get<std::string>();
      cr.eer.eer = c.at("eer").get<double>();
      cr.eer.threshold = c.at("eer_threshold").get<double>();
      cr.eer.frr = c.at("frr").get<double>();
      cr.eer.far = c.at("far").get<double>();
      cr.n_bonafide = c.at("n_bonafide").get<std::int64_t>();
      cr.n_spoof = c.at("n_spoof").get<std::int64_t>();
      const auto& m = c.at("confusion");
      cr.confusion = {m.at("tp").get<std::int64_t>(), m.at("fn").get<std::int64_t>(),
                      m.at("fp").get<std::int64_t>(), m.at("tn").get<std::int64_t>()};
      r.conditions.push_back(std::move(cr));
    }
    r.codec_conditions = j.at("codec_conditions").get<std::vector<std::string>>();
    const auto& a = j.at("aggregates");
    r.aggregates = {a.at("cavg").get<double>(), a.at("avg").get<double>()};
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(source + ": malformed report: " + e.what());
  }
}

void save_report(const std::filesystem::path& path, const EvalReport& r) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out << to_json(r).dump(2) << '\n';
  if (!out) throw IoError(path.string() + ": write failed");
}

EvalReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open file");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": not valid JSON: " + e.what());
  }
  return report_from_json(j, path.string());
}

}  // namespace codecwb
