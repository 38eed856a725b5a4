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


#include <CLI11.hpp>
#include <codecwb/common.hpp>
#include <exception>
#include <iostream>

#include "commands.hpp"

using namespace codecwb;

int main(int argc, char** argv) {
  CLI::App app{"Codec-based deepfake detection workbench", "codecwb"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(CODECWB_VERSION));

  cli::GlobalOptions global;
  app.add_option("-c,--config", global.config, "Experiment config (TOML)");
  app.add_option("--set", global.sets, "Override a config field, e.g. train.epochs=3")
      ->type_name("SECTION.KEY=VALUE");
  app.add_option("--workers", global.workers,
                 "Worker threads (default: WORKBENCH_WORKERS, then config)")
      ->check(CLI::PositiveNumber);

  std::vector<std::string> presets;
  auto* codebooks = app.add_subcommand("codebooks", "Train RVQ codebooks on train-subset reals");
  codebooks->add_option("--preset", presets, "Preset name (repeatable; default: config presets)");

  auto* generate = app.add_subcommand("generate", "Split the corpus, transcode fakes, write the manifest");

  cli::TrainOptions train_opts;
  auto* train = app.add_subcommand("train", "Train the detector and write the best checkpoint");
  train->add_option("--strategy", train_opts.strategy, "erm|sam|asam|csam")
      ->check(CLI::IsMember({"erm", "sam", "asam", "csam"}));
  train->add_option("--rho", train_opts.rho, "Perturbation radius (ignored for erm)");
  train->add_option("--manifest", train_opts.manifest, "Manifest CSV (default: indexed)");

  cli::EvalOptions eval_opts;
  auto* eval = app.add_subcommand("eval", "Score conditions and write an EER report");
  eval->add_option("--checkpoint", eval_opts.checkpoint, "Checkpoint (default: last trained)");
  eval->add_option("--conditions", eval_opts.conditions, "Condition names, e.g. C1,C2")
      ->delimiter(',');
  eval->add_option("--manifest", eval_opts.manifest, "Manifest CSV (default: indexed)");

  cli::ReportOptions report_opts;
  auto* report = app.add_subcommand("report", "Tabulate EER reports by model and strategy");
  report->add_option("--inputs", report_opts.inputs, "Report JSON or report CSV files")
      ->required();
  report->add_option("--format", report_opts.format, "table|csv")
      ->check(CLI::IsMember({"table", "csv"}));
  report->add_option("-o,--output", report_opts.output, "Write to a file instead of stdout");

  cli::SynthOptions synth_opts;
  auto* synth = app.add_subcommand("synth", "Run the synthetic two-domain strategy comparison");
  synth->add_option("--seed", synth_opts.seed, "Base seed");
  synth->add_option("--seeds", synth_opts.seeds, "Number of derived seeds")
      ->check(CLI::PositiveNumber);
  synth->add_flag("--corpus-ratio", synth_opts.corpus_ratio, "Use the ~29:1 domain ratio");
  synth->add_option("--strategies", synth_opts.strategies, "Subset of erm,sam,asam,csam")
      ->delimiter(',');
  synth->add_option("-o,--output", synth_opts.output, "Write results as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*codebooks) return cli::cmd_codebooks(global, presets);
    if (*generate) return cli::cmd_generate(global);
    if (*train) return cli::cmd_train(global, train_opts);
    if (*eval) return cli::cmd_eval(global, eval_opts);
    if (*report) return cli::cmd_report(report_opts);
    if (*synth) {
      synth_opts.workers = global.workers;
      return cli::cmd_synth(synth_opts);
    }
  } catch (const InvalidArgument& e) {
    std::cerr << "codecwb: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "codecwb: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
