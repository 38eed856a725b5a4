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


#include <gtest/gtest.h>
#include <sys/wait.h>

#include <codecwb/metrics.hpp>
#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "synth_audio.hpp"
#include "temp_dir.hpp"

using codecwb::testing::TempDir;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

CliRun run_cli(const fs::path& cwd, const std::string& args) {
  const std::string cmd = "cd '" + cwd.string() + "' && '" CODECWB_CLI "' " + args +
                          " > .stdout 2> .stderr";
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(cwd / ".stdout");
  r.err = slurp(cwd / ".stderr");
  return r;
}

constexpr const char* kConfig = R"(seed = 7

[paths]
corpus_dir = "corpus"
work_dir = "work"

[audio]
duration_s = 0.5

[mel]
sample_rate = 8000
n_fft = 256
win_length = 200
hop = 80
n_mels = 16
f_max = 4000.0

[preset.T1]
sample_rate = 8000
hop = 40
num_quantizers = 2
codebook_bits = 3

[preset.T2]
sample_rate = 8000
hop = 80
num_quantizers = 2
codebook_bits = 3

[codec]
presets = ["T1", "T2"]
holdout = ["T2"]
iterations = 5

[train]
epochs = 2
batch_size = 4
arch = [32, 8, 2]

[conditions]
C1 = "T1"
C2 = "T2"
)";

struct Project {
  TempDir dir{"cli"};
  Project() {
    codecwb::testing::write_corpus(dir / "corpus",
                                   codecwb::testing::synth_corpus(12, 5, 8000, 0.5));
    std::ofstream(dir / "exp.toml") << kConfig;
  }
  CliRun cli(const std::string& args) { return run_cli(dir.path(), "-c exp.toml " + args); }
  nlohmann::json index() { return nlohmann::json::parse(slurp(dir / "work/index.json")); }
};

}  // namespace

TEST(Cli, VersionAndUsageErrors) {
  TempDir dir("cli");
  const CliRun v = run_cli(dir.path(), "--version");
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find(CODECWB_VERSION), std::string::npos);
  EXPECT_EQ(run_cli(dir.path(), "").code, 2);
  EXPECT_EQ(run_cli(dir.path(), "frobnicate").code, 2);
  EXPECT_EQ(run_cli(dir.path(), "train --strategy adam").code, 2);
  EXPECT_EQ(run_cli(dir.path(), "codebooks").code, 2);  // no --config
  EXPECT_EQ(run_cli(dir.path(), "-c missing.toml codebooks").code, 2);
}

TEST(Cli, ConfigErrorsExitTwo) {
  Project p;
  EXPECT_EQ(p.cli("--set train.rhoo=1 codebooks").code, 2);
  EXPECT_EQ(p.cli("codebooks --preset NOPE").code, 2);
}

TEST(Cli, MissingArtifactsExitOneWithHint) {
  Project p;
  const CliRun g = p.cli("generate");
  EXPECT_EQ(g.code, 1);
  EXPECT_NE(g.err.find("codecwb codebooks"), std::string::npos) << g.err;
  const CliRun t = p.cli("train");
  EXPECT_EQ(t.code, 1);
  EXPECT_NE(t.err.find("codecwb generate"), std::string::npos) << t.err;
  const CliRun e = p.cli("eval");
  EXPECT_EQ(e.code, 1);
}

TEST(Cli, FullFlow) {
  Project p;
  const CliRun cb = p.cli("codebooks");
  ASSERT_EQ(cb.code, 0) << cb.err;
  EXPECT_NE(cb.out.find("residual"), std::string::npos);
  const auto cb_index = p.index()["codebooks"];
  ASSERT_TRUE(cb_index.contains("T1") && cb_index.contains("T2"));
  const std::string t1 = cb_index["T1"];
  const std::string t1_bytes = slurp(p.dir / "work" / t1);

  // Identical inputs give the identical artifact name and bytes.
  ASSERT_EQ(p.cli("codebooks --preset T1").code, 0);
  EXPECT_EQ(p.index()["codebooks"]["T1"], t1);
  EXPECT_EQ(slurp(p.dir / "work" / t1), t1_bytes);

  const CliRun gen = p.cli("generate");
  ASSERT_EQ(gen.code, 0) << gen.err;
  const std::string manifest = p.index()["manifest"];
  EXPECT_TRUE(fs::exists(p.dir / "work" / manifest));
  EXPECT_NE(gen.out.find("T2"), std::string::npos);

  const CliRun tr = p.cli("train --strategy erm --rho 0.2");
  ASSERT_EQ(tr.code, 0) << tr.err;
  EXPECT_NE(tr.err.find("--rho has no effect"), std::string::npos) << tr.err;
  EXPECT_NE(tr.out.find("selected epoch"), std::string::npos);
  EXPECT_TRUE(fs::exists(p.dir / "work" / p.index()["checkpoint"].get<std::string>()));

  // A single training domain cannot be co-trained.
  EXPECT_EQ(p.cli("train --strategy csam").code, 2);

  const CliRun ev = p.cli("eval");
  ASSERT_EQ(ev.code, 0) << ev.err;
  const fs::path report = p.dir / "work" / p.index()["report"].get<std::string>();
  const auto rep = codecwb::load_report(report);
  ASSERT_EQ(rep.conditions.size(), 2u);
  EXPECT_EQ(rep.conditions[0].condition, "C1");
  EXPECT_EQ(rep.conditions[1].method, "T2");
  EXPECT_EQ(rep.strategy, "erm");
  EXPECT_EQ(rep.seed, 7u);
  EXPECT_EQ(rep.conditions[1].n_spoof, 12);

  EXPECT_EQ(p.cli("eval --conditions C9").code, 2);
  const CliRun one = p.cli("eval --conditions C2");
  ASSERT_EQ(one.code, 0) << one.err;

  const CliRun csv = run_cli(p.dir.path(), "report --inputs '" + report.string() +
                                            "' --format csv -o table.csv");
  ASSERT_EQ(csv.code, 0) << csv.err;
  const std::string text = slurp(p.dir / "table.csv");
  EXPECT_EQ(text.substr(0, text.find('\n')), "model,strategy,C1,C2,CAVG,AVG");
  const CliRun again = run_cli(p.dir.path(), "report --inputs table.csv --format csv");
  ASSERT_EQ(again.code, 0) << again.err;
  EXPECT_EQ(again.out, text);
  const CliRun table = run_cli(p.dir.path(), "report --inputs table.csv");
  EXPECT_EQ(table.code, 0);
  EXPECT_NE(table.out.find("CAVG"), std::string::npos);
}

TEST(Cli, SynthWritesJson) {
  TempDir dir("cli");
  const CliRun r = run_cli(dir.path(), "synth --seeds 2 --strategies erm,csam -o synth.json");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp(dir / "synth.json"));
  EXPECT_EQ(j["n_seeds"], 2);
  EXPECT_EQ(j["strategies"]["csam"]["eval_eer"].size(), 2u);
  EXPECT_FALSE(j["strategies"].contains("sam"));
  EXPECT_EQ(run_cli(dir.path(), "synth --strategies bogus").code, 2);
}
