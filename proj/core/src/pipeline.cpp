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

#include "codecwb/pipeline.hpp"

#include <unordered_map>

#include "codecwb/audio.hpp"
#include "codecwb/thread_pool.hpp"

namespace codecwb {

FeatureTable extract_feature_table(const Manifest& m, const MelConfig& mel,
                                   double duration_s, int workers) {
  FeatureTable t;
  const auto n = m.records.size();
  t.features.resize(static_cast<Eigen::Index>(n), 2 * mel.n_mels);
  parallel_for(n, workers, [&](std::size_t i) {
    const auto& r = m.records[i];
    Waveform w;
    try {
      w = read_wav(r.path);
    } catch (const Error& e) {
      throw IoError("record '" + r.utt_id + "': " + e.what());
    }
    const FeatureVector f = extract_features(w, mel, duration_s);
    t.features.row(static_cast<Eigen::Index>(i)) = f.cast<float>().transpose();
  });
  for (const auto& r : m.records) {
    t.labels.push_back(r.label);
    t.domains.push_back(r.domain);
    t.ids.push_back(r.utt_id);
  }
  return t;
}

Manifest select_subset(const Manifest& m, Subset subset, const std::set<std::string>& domains) {
  Manifest out;
  out.provenance = m.provenance;
  for (const auto& r : m.records) {
    if (r.subset == subset && (domains.empty() || domains.contains(r.domain))) {
      out.records.push_back(r);
    }
  }
  return out;
}

Frames collect_codec_frames(const Manifest& m, const CodecPreset& p, int workers) {
  std::vector<const UttRecord*> sources;
  for (const auto& r : m.records) {
    if (r.label == Label::kBonafide && r.subset == Subset::kTrain) sources.push_back(&r);
  }
  if (sources.empty()) throw InvalidArgument("no bonafide train records to learn codebooks from");
  std::vector<Frames> parts(sources.size());
  parallel_for(sources.size(), workers, [&](std::size_t i) {
    parts[i] = codec_frames(read_wav(sources[i]->path), p);
  });
  Eigen::Index rows = 0;
  for (const auto& f : parts) rows += f.rows();
  Frames all(rows, p.frame);
  Eigen::Index at = 0;
  for (const auto& f : parts) {
    all.middleRows(at, f.rows()) = f;
    at += f.rows();
  }
  return all;
}

EvalReport evaluate_conditions(const ModelParams& p, const Manifest& m,
                               const std::vector<ConditionSpec>& conditions,
                               const std::vector<std::string>& codec_conditions,
                               const std::set<std::string>& holdout,
                               const MelConfig& mel, double duration_s, int workers) {
  if (conditions.empty()) throw InvalidArgument("evaluate: no conditions requested");
  std::vector<Manifest> subsets;
  Manifest needed;
  std::unordered_map<std::string, std::size_t> row_of;
  for (const auto& c : conditions) {
    subsets.push_back(condition_filter(m, c.method, holdout));
    for (const auto& r : subsets.back().records) {
      if (row_of.emplace(r.utt_id, needed.records.size()).second) needed.records.push_back(r);
    }
  }
  const FeatureTable table = extract_feature_table(needed, mel, duration_s, workers);
  const Vec<float> prob = bonafide_probability(p, table.features);

  EvalReport report;
  report.codec_conditions = codec_conditions;
  for (std::size_t k = 0; k < conditions.size(); ++k) {
    ConditionResult cr;
    cr.condition = conditions[k].name;
    cr.method = conditions[k].method;
    std::vector<double> bona, spoof, all;
    std::vector<Label> labels;
    for (const auto& r : subsets[k].records) {
      const double s = static_cast<double>(prob(static_cast<Eigen::Index>(row_of.at(r.utt_id))));
      (r.label == Label::kBonafide ? bona : spoof).push_back(s);
      all.push_back(s);
      labels.push_back(r.label);
    }
    if (bona.empty() || spoof.empty()) {
      throw InvalidArgument("condition " + cr.condition + " needs both bonafide and spoof records");
    }
    cr.eer = compute_eer(bona, spoof);
    cr.confusion = confusion_matrix(all, labels, 0.5);
    cr.n_bonafide = static_cast<std::int64_t>(bona.size());
    cr.n_spoof = static_cast<std::int64_t>(spoof.size());
    report.conditions.push_back(std::move(cr));
  }
  report.finalize();
  return report;
}

}  // namespace codecwb
