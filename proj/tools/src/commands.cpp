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


#include "commands.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <codecwb/checkpoint.hpp>
#include <codecwb/config.hpp>
#include <codecwb/corpus.hpp>
#include <codecwb/pipeline.hpp>
#include <codecwb/synthbench.hpp>
#include <codecwb/thread_pool.hpp>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>

#include "report_table.hpp"
#include "workdir.hpp"

namespace codecwb::cli {
namespace fs = std::filesystem;

namespace {

const std::string kToolVersion = std::string("codecwb ") + CODECWB_VERSION;

// Timestamps appear only here, never in artifacts.
void log_line(const char* level, const std::string& message) {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  localtime_r(&now, &tm);
  char stamp[16];
  std::strftime(stamp, sizeof stamp, "%H:%M:%S", &tm);
  std::cerr << stamp << ' ' << level << ' ' << message << '\n';
}

struct Context {
  ExperimentConfig cfg;
  int workers = 1;
  WorkDir work;
};

Context open_context(const GlobalOptions& g, std::vector<std::string> extra_sets = {}) {
  if (g.config.empty()) throw InvalidArgument("--config is required");
  std::vector<std::string> sets = g.sets;
  sets.insert(sets.end(), extra_sets.begin(), extra_sets.end());
  ExperimentConfig cfg = load_config(g.config, sets);
  const int workers = g.workers > 0 ? g.workers : resolve_workers(cfg.workers);
  WorkDir work(cfg.work_dir);
  return {std::move(cfg), workers, std::move(work)};
}

// Scan + split shared by `codebooks` and `generate` so both see the same
// train subset.
Manifest split_corpus(const ExperimentConfig& cfg) {
  if (cfg.corpus_dir.empty()) throw ConfigError("paths.corpus_dir is not set");
  if (!fs::is_directory(cfg.corpus_dir)) {
    throw IoError(cfg.corpus_dir.string() + ": corpus dir does not exist");
  }
  ScanResult scan = scan_real(cfg.corpus_dir, cfg.corpus_domain);
  for (const auto& w : scan.warnings) log_warn(w);
  Manifest m = split_manifest(scan.manifest, cfg.seed);
  m.provenance = {cfg.seed, kToolVersion};
  return m;
}

const CodecPreset& resolve_preset(const ExperimentConfig& cfg, const std::string& name) {
  for (const auto& p : cfg.presets) {
    if (p.name == name) return p;
  }
  if (const auto* p = find_builtin_preset(name)) return *p;
  throw InvalidArgument("unknown preset '" + name + "'");
}

Manifest indexed_manifest(const WorkDir& work, const std::string& override_path) {
  const fs::path path =
      override_path.empty() ? work.artifact("manifest", "codecwb generate") : fs::path(override_path);
  return read_manifest(path);
}

std::string arch_name(const Arch& arch) {
  std::string s = "mlp";
  for (std::size_t i = 0; i < arch.size(); ++i) s += (i ? "x" : "-") + std::to_string(arch[i]);
  return s;
}

void print_counts(const Manifest& m, const std::vector<CodecPreset>& presets) {
  std::vector<std::string> methods{std::string(kRealMethod)};
  for (const auto& p : presets) methods.push_back(p.name);
  std::set<std::string> extra;
  for (const auto& r : m.records) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) {
      extra.insert(r.method);
    }
  }
  methods.insert(methods.end(), extra.begin(), extra.end());
  fmt::print("{:<10} {:>8} {:>8} {:>8}\n", "method", "train", "dev", "eval");
  for (const auto& method : methods) {
    fmt::print("{:<10} {:>8} {:>8} {:>8}\n", method, m.count(method, Subset::kTrain),
               m.count(method, Subset::kDev), m.count(method, Subset::kEval));
  }
}

}  // namespace

void log_info(const std::string& message) { log_line("INFO", message); }
void log_warn(const std::string& message) { log_line("WARN", message); }

int cmd_codebooks(const GlobalOptions& g, const std::vector<std::string>& names) {
  Context ctx = open_context(g);
  const auto& cfg = ctx.cfg;
  std::vector<CodecPreset> presets;
  for (const auto& n : names) presets.push_back(resolve_preset(cfg, n));
  if (names.empty()) presets = cfg.presets;
  if (presets.empty()) throw ConfigError("no presets: set codec.presets or pass --preset");

  const Manifest m = split_corpus(cfg);
  for (const auto& p : presets) {
    const Frames frames = collect_codec_frames(m, p, ctx.workers);
    if (static_cast<std::size_t>(frames.rows()) < p.codebook_size()) {
      throw Error(fmt::format("preset {}: {} training frames, need at least {}", p.name,
                              frames.rows(), p.codebook_size()));
    }
    log_info(fmt::format("training {} codebooks: {} stages x {} codewords on {} frames", p.name,
                         p.num_quantizers, p.codebook_size(), frames.rows()));
    const CodebookSet cb = train_codebooks(frames, p, derive_seed(cfg.seed, "codebooks/" + p.name),
                                           cfg.codebook_options);
    if (cb.status == TrainStatus::kDegenerate) {
      log_warn(p.name + ": too few distinct frames; some codewords are duplicates");
    }
    const fs::path tmp = ctx.work.scratch("codebooks", "cb");
    save_codebooks(tmp, cb);
    const std::string rel = ctx.work.commit(tmp, p.name);
    ctx.work.index()["codebooks"][p.name] = rel;
    ctx.work.save_index();

    fmt::print("{} -> {}\n", p.name, rel);
    fmt::print("{:>5} {:>14} {:>10}\n", "stage", "residual", "relative");
    const double raw = cb.residual_energy.front();
    for (std::size_t s = 0; s < cb.residual_energy.size(); ++s) {
      fmt::print("{:>5} {:>14.6g} {:>10.4f}\n", s, cb.residual_energy[s],
                 raw > 0.0 ? cb.residual_energy[s] / raw : 0.0);
    }
  }
  return 0;
}

int cmd_generate(const GlobalOptions& g) {
  Context ctx = open_context(g);
  const auto& cfg = ctx.cfg;
  if (cfg.presets.empty()) throw ConfigError("codec.presets is empty");

  std::map<std::string, CodebookSet> codebooks;
  for (const auto& p : cfg.presets) {
    CodebookSet cb = load_codebooks(ctx.work.artifact("codebooks", p.name, "codecwb codebooks"));
    if (!(cb.preset == p)) {
      throw Error("codebooks for " + p.name + " were trained with different preset settings; "
                  "rerun `codecwb codebooks`");
    }
    codebooks.emplace(p.name, std::move(cb));
  }

  const Manifest reals = split_corpus(cfg);
  log_info(fmt::format("transcoding {} utterances through {} presets", reals.records.size(),
                       cfg.presets.size()));
  GenerateResult gen =
      generate_fakes(reals, cfg.presets, codebooks, cfg.holdout, ctx.work.root() / "fakes",
                     ctx.workers);
  Manifest merged = std::move(gen.manifest);
  for (const auto& path : cfg.external_manifests) {
    Manifest ext = read_manifest(path);
    const bool unsplit = std::any_of(ext.records.begin(), ext.records.end(),
                                     [](const UttRecord& r) { return r.subset == Subset::kUnset; });
    if (unsplit) ext = split_manifest(ext, cfg.seed);
    merged.records.insert(merged.records.end(), ext.records.begin(), ext.records.end());
  }
  merged.provenance = {cfg.seed, kToolVersion};
  merged.validate();

  const fs::path tmp = ctx.work.scratch("manifests", "csv");
  write_manifest(tmp, merged);
  const std::string rel = ctx.work.commit(tmp, "manifest");
  ctx.work.index()["manifest"] = rel;
  ctx.work.save_index();

  fmt::print("manifest -> {}\n", rel);
  print_counts(merged, cfg.presets);
  if (!gen.failures.empty()) {
    for (const auto& f : gen.failures) log_warn(f);
    std::cerr << gen.failures.size() << " file(s) failed to generate\n";
    return 1;
  }
  return 0;
}

int cmd_train(const GlobalOptions& g, const TrainOptions& o) {
  std::vector<std::string> sets;
  if (o.strategy) sets.push_back("train.strategy=\"" + *o.strategy + "\"");
  Context ctx = open_context(g, sets);
  auto& cfg = ctx.cfg;
  if (o.rho) {
    if (cfg.train.sam.variant == Strategy::kErm) {
      log_warn("--rho has no effect with strategy erm; ignored");
    } else {
      cfg.train.sam.rho = *o.rho;
      try {
        cfg.train.validate();
      } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("--rho: ") + e.what());
      }
    }
  }

  const Manifest m = indexed_manifest(ctx.work, o.manifest);
  std::set<std::string> domains;
  for (const auto& [tag, group] : cfg.domains) domains.insert(tag);
  const Manifest train_m = select_subset(m, Subset::kTrain, domains);
  const Manifest dev_m = select_subset(m, Subset::kDev, domains);
  if (train_m.records.empty()) throw Error("manifest has no train records for the configured domains");
  if (dev_m.records.empty()) throw Error("manifest has no dev records for the configured domains");
  std::set<std::string> present;
  for (const auto& r : train_m.records) present.insert(r.domain);
  for (const auto& tag : domains) {
    if (!present.contains(tag)) log_warn("domain '" + tag + "' has no train records");
  }
  if (cfg.train.sam.variant == Strategy::kCsam && present.size() < 2) {
    throw InvalidArgument("csam needs at least two domain tags in the train subset");
  }

  log_info(fmt::format("extracting features: {} train, {} dev", train_m.records.size(),
                       dev_m.records.size()));
  const FeatureTable tr = extract_feature_table(train_m, cfg.mel, cfg.duration_s, ctx.workers);
  const FeatureTable dv = extract_feature_table(dev_m, cfg.mel, cfg.duration_s, ctx.workers);

  const std::string strategy(to_string(cfg.train.sam.variant));
  log_info(fmt::format("training {} ({}), {} epochs", strategy, arch_name(cfg.train.arch),
                       cfg.train.epochs));
  TrainResult res = train(tr, dv, cfg.train, [](const EpochRecord& e) {
    log_info(fmt::format("epoch {} lr {:.3g} train_loss {:.5f} dev_loss {:.5f} dev_eer {:.3f}%",
                         e.epoch, e.lr, e.train_loss, e.dev_loss, 100.0 * e.dev_eer));
  });
  if (res.plan) fmt::print("batch plan: {}\n", res.plan->describe());

  Checkpoint c{res.best, res.best_state, res.best_epoch, res.best_metric,
               std::string(to_string(cfg.train.selection_metric)), strategy};
  const fs::path ckpt_tmp = ctx.work.scratch("checkpoints", "ckpt");
  save_checkpoint(ckpt_tmp, c);
  const std::string ckpt_rel = ctx.work.commit(ckpt_tmp, strategy);

  const fs::path hist_tmp = ctx.work.scratch("history", "csv");
  {
    std::ofstream out(hist_tmp, std::ios::binary);
    write_history_csv(out, res.history);
    if (!out) throw IoError(hist_tmp.string() + ": write failed");
  }
  const std::string hist_rel = ctx.work.commit(hist_tmp, strategy);

  auto& index = ctx.work.index();
  index["checkpoints"][strategy] = ckpt_rel;
  index["histories"][strategy] = hist_rel;
  index["checkpoint"] = ckpt_rel;
  ctx.work.save_index();

  fmt::print("checkpoint -> {}\nhistory -> {}\n", ckpt_rel, hist_rel);
  fmt::print("selected epoch {} ({} {:.6f})\n", res.best_epoch,
             to_string(cfg.train.selection_metric), res.best_metric);
  return 0;
}

int cmd_eval(const GlobalOptions& g, const EvalOptions& o) {
  Context ctx = open_context(g);
  const auto& cfg = ctx.cfg;
  const fs::path ckpt_path = o.checkpoint.empty()
                                 ? ctx.work.artifact("checkpoint", "codecwb train")
                                 : fs::path(o.checkpoint);
  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  if (ckpt.params.arch.front() != 2 * cfg.mel.n_mels) {
    throw ConfigError(fmt::format("checkpoint {} expects {} inputs but the mel config yields {}",
                                  ckpt_path.string(), ckpt.params.arch.front(),
                                  2 * cfg.mel.n_mels));
  }
  const Manifest m = indexed_manifest(ctx.work, o.manifest);

  std::vector<std::string> names = o.conditions;
  if (names.empty()) names = cfg.eval_conditions;
  if (names.empty()) {
    for (const auto& [alias, method] : cfg.conditions) names.push_back(alias);
  }
  if (names.empty()) {
    for (const auto& p : cfg.presets) names.push_back(p.name);
  }
  std::set<std::string> methods;
  for (const auto& r : m.records) methods.insert(r.method);
  std::vector<ConditionSpec> specs;
  for (const auto& n : names) {
    const std::string method = cfg.condition_method(n);
    if (method == kRealMethod || !methods.contains(method)) {
      throw InvalidArgument("unknown condition '" + n + "' (no " + method +
                            " records in the manifest)");
    }
    specs.push_back({n, method});
  }

  EvalReport report = evaluate_conditions(ckpt.params, m, specs, cfg.codec_conditions(names),
                                          cfg.holdout, cfg.mel, cfg.duration_s, ctx.workers);
  report.seed = cfg.seed;
  report.checkpoint_id = file_hash(ckpt_path);
  report.model = arch_name(ckpt.params.arch);
  report.strategy = ckpt.strategy;

  const fs::path tmp = ctx.work.scratch("reports", "json");
  save_report(tmp, report);
  const std::string rel = ctx.work.commit(tmp, report.strategy);
  ctx.work.index()["reports"][report.strategy] = rel;
  ctx.work.index()["report"] = rel;
  ctx.work.save_index();

  fmt::print("report -> {}\n", rel);
  fmt::print("{:<10} {:<8} {:>8} {:>8} {:>9}\n", "condition", "method", "bonafide", "spoof",
             "EER %");
  for (const auto& c : report.conditions) {
    fmt::print("{:<10} {:<8} {:>8} {:>8} {:>9}\n", c.condition, c.method, c.n_bonafide,
               c.n_spoof, format_percent(c.eer.eer));
  }
  fmt::print("{:<10} {:>36}\n{:<10} {:>36}\n", "CAVG", format_percent(report.aggregates.cavg),
             "AVG", format_percent(report.aggregates.avg));
  return 0;
}

int cmd_report(const ReportOptions& o) {
  if (o.format != "table" && o.format != "csv") {
    throw InvalidArgument("--format must be table or csv");
  }
  std::vector<ReportRow> rows;
  for (const auto& in : o.inputs) {
    auto r = load_rows(in);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  const std::string text = o.format == "csv" ? format_csv(rows) : format_table(rows);
  if (o.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(o.output, std::ios::binary);
    out << text;
    if (!out) throw IoError(o.output + ": write failed");
  }
  return 0;
}

int cmd_synth(const SynthOptions& o) {
  if (o.seeds < 1) throw InvalidArgument("--seeds must be >= 1");
  SynthSpec spec = o.corpus_ratio ? SynthSpec::corpus_ratio() : SynthSpec{};
  spec.seed = o.seed;
  std::vector<Strategy> strategies;
  for (const auto& s : o.strategies) strategies.push_back(parse_strategy(s));
  const TrainConfig cfg = synth_train_config(spec);
  const int workers = o.workers > 0 ? o.workers : resolve_workers(1);
  log_info(fmt::format("synthetic benchmark: d={} large={} small={} seeds={}", spec.dim,
                       spec.n_large, spec.n_small, o.seeds));
  const SynthComparison cmp = run_comparison(spec, cfg, strategies, o.seeds, workers);

  nlohmann::json j;
  j["seed"] = spec.seed;
  j["n_seeds"] = o.seeds;
  j["spec"] = {{"dim", spec.dim},
               {"n_large", spec.n_large},
               {"n_small", spec.n_small},
               {"n_eval", spec.n_eval},
               {"shortcut_strength", spec.shortcut_strength},
               {"signal_strength", spec.signal_strength},
               {"noise_sigma", spec.noise_sigma}};
  fmt::print("{:<8} {:>9}   per-seed small-domain EER %\n", "strategy", "median %");
  for (const auto& out : cmp.outcomes) {
    std::string per_seed;
    for (double e : out.eval_eer) per_seed += " " + format_percent(e);
    fmt::print("{:<8} {:>9}  {}\n", to_string(out.strategy), format_percent(out.median),
               per_seed);
    j["strategies"][std::string(to_string(out.strategy))] = {{"median", out.median},
                                                              {"eval_eer", out.eval_eer}};
  }
  if (!o.output.empty()) {
    std::ofstream f(o.output, std::ios::binary);
    f << j.dump(2) << '\n';
    if (!f) throw IoError(o.output + ": write failed");
  }
  return 0;
}

}  // namespace codecwb::cli
