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

#include <codecwb/corpus.hpp>
#include <fstream>
#include <map>

#include "synth_audio.hpp"
#include "temp_dir.hpp"

using namespace codecwb;
using codecwb::testing::TempDir;

namespace {

Manifest reals(std::size_t n, const std::string& domain = "codecfake") {
  Manifest m;
  for (std::size_t i = 0; i < n; ++i) {
    UttRecord r;
    r.utt_id = "spk" + std::to_string(i % 7) + "/utt" + std::to_string(i);
    r.path = "/data/" + r.utt_id + ".wav";
    r.domain = domain;
    r.method = std::string(kRealMethod);
    m.records.push_back(r);
  }
  return m;
}

UttRecord fake_of(const UttRecord& src, const std::string& method) {
  UttRecord f = src;
  f.utt_id = src.utt_id + "#" + method;
  f.label = Label::kSpoof;
  f.method = method;
  return f;
}

// Seven methods; the last is forced to eval as generation does for holdout
// presets.
Manifest toy_with_fakes(std::size_t n, std::uint64_t seed) {
  Manifest m = split_manifest(reals(n), seed);
  const std::size_t n_real = m.records.size();
  for (int k = 1; k <= 7; ++k) {
    const std::string method = "F0" + std::to_string(k);
    for (std::size_t i = 0; i < n_real; ++i) {
      UttRecord f = fake_of(m.records[i], method);
      if (k == 7) f.subset = Subset::kEval;
      m.records.push_back(f);
    }
  }
  return m;
}

CodecPreset tiny_preset(const std::string& name) {
  CodecPreset p;
  p.name = name;
  p.sample_rate = 8000;
  p.hop = 40;
  p.frame = 80;
  p.num_quantizers = 2;
  p.codebook_bits = 3;
  return p;
}

}  // namespace

TEST(Split, CountsAreCeilTenthForDevAndEval) {
  for (std::size_t n : {10u, 11u, 19u, 20u, 99u, 100u, 101u, 257u}) {
    const Manifest m = split_manifest(reals(n), 3);
    const std::size_t held = (n + 9) / 10;
    EXPECT_EQ(m.count(kRealMethod, Subset::kDev), held) << n;
    EXPECT_EQ(m.count(kRealMethod, Subset::kEval), held) << n;
    EXPECT_EQ(m.count(kRealMethod, Subset::kTrain), n - 2 * held) << n;
  }
}

TEST(Split, FakesInheritTheirSourceSubset) {
  Manifest m = reals(40);
  const std::size_t n = m.records.size();
  for (std::size_t i = 0; i < n; ++i) m.records.push_back(fake_of(m.records[i], "F01"));
  const Manifest s = split_manifest(m, 9);
  std::map<std::string, Subset> by_id;
  for (const auto& r : s.records) by_id[r.utt_id] = r.subset;
  for (const auto& r : s.records) {
    EXPECT_EQ(r.subset, by_id.at(source_id(r))) << r.utt_id;
    EXPECT_NE(r.subset, Subset::kUnset);
  }
}

TEST(Split, DeterministicInSeed) {
  EXPECT_EQ(split_manifest(reals(50), 1), split_manifest(reals(50), 1));
  EXPECT_NE(split_manifest(reals(50), 1), split_manifest(reals(50), 2));
  EXPECT_THROW(split_manifest(reals(9), 1), InvalidArgument);
}

TEST(ConditionFilter, SeenAndHeldOutMethods) {
  const Manifest m = toy_with_fakes(100, 4);
  const Manifest c1 = condition_filter(m, "F01", {"F07"});
  EXPECT_EQ(c1.count(kRealMethod, Subset::kEval), 10u);
  EXPECT_EQ(c1.count("F01", Subset::kEval), 10u);
  EXPECT_EQ(c1.records.size(), 20u);
  const Manifest c7 = condition_filter(m, "F07", {"F07"});
  EXPECT_EQ(c7.count(kRealMethod, Subset::kEval), 10u);
  EXPECT_EQ(c7.count("F07", Subset::kEval), 100u);
  EXPECT_EQ(c7.records.size(), 110u);
  EXPECT_THROW(condition_filter(m, "F09"), InvalidArgument);
  EXPECT_THROW(condition_filter(m, "real"), InvalidArgument);
}

TEST(ConditionFilter, HeldOutMethodHasNoTrainOrDevRecords) {
  const Manifest m = toy_with_fakes(100, 5);
  EXPECT_EQ(m.count("F07", Subset::kTrain), 0u);
  EXPECT_EQ(m.count("F07", Subset::kDev), 0u);
  for (int k = 1; k <= 6; ++k) {
    const std::string f = "F0" + std::to_string(k);
    EXPECT_EQ(m.count(f, Subset::kTrain), 80u);
    EXPECT_EQ(m.count(f, Subset::kDev), 10u);
    EXPECT_EQ(m.count(f, Subset::kEval), 10u);
  }
}

TEST(ManifestCsv, RoundTripWithQuotingAndRelativePaths) {
  TempDir dir("manifest");
  Manifest m = split_manifest(reals(12), 1);
  m.records[0].utt_id = "odd, \"quoted\" id";
  m.records[1].path = dir.path() / "audio" / "x.wav";
  m.records.push_back(fake_of(m.records[2], "F01"));
  m.provenance = {77, "codecwb test"};
  std::filesystem::create_directories(dir / "sub");
  write_manifest(dir / "sub" / "m.csv", m);

  std::ifstream in(dir / "sub" / "m.csv");
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  EXPECT_NE(text.find("# seed=77\n"), std::string::npos);
  EXPECT_NE(text.find("utt_id,path,label,domain,method,subset\n"), std::string::npos);
  EXPECT_NE(text.find("../audio/x.wav"), std::string::npos);
  EXPECT_NE(text.find("\"odd, \"\"quoted\"\" id\""), std::string::npos);

  const Manifest back = read_manifest(dir / "sub" / "m.csv");
  EXPECT_EQ(back, m);
}

TEST(ManifestCsv, RejectsMalformedInput) {
  TempDir dir("manifest");
  std::ofstream(dir / "a.csv") << "id,path\nx,y\n";
  EXPECT_THROW(read_manifest(dir / "a.csv"), FormatError);
  std::ofstream(dir / "b.csv") << "utt_id,path,label,domain,method,subset\nx,y,bonafide\n";
  EXPECT_THROW(read_manifest(dir / "b.csv"), FormatError);
  std::ofstream(dir / "c.csv")
      << "utt_id,path,label,domain,method,subset\nx,y,spoof,d,real,train\n";
  EXPECT_THROW(read_manifest(dir / "c.csv"), FormatError);
  std::ofstream(dir / "d.csv")
      << "utt_id,path,label,domain,method,subset\nx,y,bonafide,d,real,test\n";
  EXPECT_THROW(read_manifest(dir / "d.csv"), FormatError);
}

TEST(ManifestValidate, DuplicatesAndLabelMismatch) {
  Manifest m = reals(3);
  m.records.push_back(m.records[0]);
  EXPECT_THROW(m.validate(), FormatError);
  Manifest n = reals(3);
  n.records[1].method = "F01";
  EXPECT_THROW(n.validate(), FormatError);
}

TEST(ScanReal, SortedRecursiveAndSkipsUnreadable) {
  TempDir dir("scan");
  std::filesystem::create_directories(dir / "b");
  const Waveform w = codecwb::testing::synth_utterance(1, 8000, 0.1);
  write_wav(dir / "b" / "z.wav", w);
  write_wav(dir / "a.WAV", w);
  std::ofstream(dir / "broken.wav") << "not a wav";
  std::ofstream(dir / "notes.txt") << "ignored";
  const ScanResult s = scan_real(dir.path(), "vctk");
  ASSERT_EQ(s.manifest.records.size(), 2u);
  EXPECT_EQ(s.manifest.records[0].utt_id, "a");
  EXPECT_EQ(s.manifest.records[1].utt_id, "b/z");
  EXPECT_EQ(s.manifest.records[1].domain, "vctk");
  EXPECT_EQ(s.manifest.records[1].label, Label::kBonafide);
  EXPECT_EQ(s.warnings.size(), 1u);

  TempDir empty("scan-empty");
  EXPECT_THROW(scan_real(empty.path()), InvalidArgument);
}

TEST(GenerateFakes, HoldoutGoesToEvalAndFilesExist) {
  TempDir dir("gen");
  std::filesystem::create_directories(dir / "corpus");
  for (int i = 0; i < 12; ++i) {
    write_wav(dir / "corpus" / ("u" + std::to_string(i) + ".wav"),
              codecwb::testing::synth_utterance(static_cast<std::uint64_t>(i), 8000, 0.3));
  }
  const Manifest m = split_manifest(scan_real(dir / "corpus").manifest, 2);

  std::vector<CodecPreset> presets{tiny_preset("A"), tiny_preset("B")};
  std::map<std::string, CodebookSet> cbs;
  for (const auto& p : presets) {
    Frames all(0, p.frame);
    for (const auto& r : m.records) {
      const Frames f = codec_frames(read_wav(r.path), p);
      Frames next(all.rows() + f.rows(), p.frame);
      next << all, f;
      all = next;
    }
    cbs[p.name] = train_codebooks(all, p, 1);
  }
  const GenerateResult g = generate_fakes(m, presets, cbs, {"B"}, dir / "fakes", 2);
  EXPECT_TRUE(g.failures.empty());
  ASSERT_EQ(g.manifest.records.size(), 36u);
  EXPECT_EQ(g.manifest.count("A", Subset::kTrain), m.count(kRealMethod, Subset::kTrain));
  EXPECT_EQ(g.manifest.count("B", Subset::kEval), 12u);
  for (const auto& r : g.manifest.records) {
    EXPECT_TRUE(std::filesystem::exists(r.path)) << r.path;
    if (r.method == "A") {
      EXPECT_EQ(r.utt_id, source_id(r) + "#A");
      const Waveform fake = read_wav(r.path);
      EXPECT_EQ(fake.sample_rate, 8000);
    }
  }

  std::map<std::string, CodebookSet> missing{{"A", cbs["A"]}};
  EXPECT_THROW(generate_fakes(m, presets, missing, {}, dir / "f2"), InvalidArgument);
}

TEST(GenerateFakes, UnreadableSourceIsReportedNotThrown) {
  TempDir dir("gen");
  std::filesystem::create_directories(dir / "corpus");
  for (int i = 0; i < 10; ++i) {
    write_wav(dir / "corpus" / ("u" + std::to_string(i) + ".wav"),
              codecwb::testing::synth_utterance(static_cast<std::uint64_t>(i), 8000, 0.3));
  }
  const Manifest m = split_manifest(scan_real(dir / "corpus").manifest, 2);
  const CodecPreset p = tiny_preset("A");
  Frames all(0, p.frame);
  for (const auto& r : m.records) {
    const Frames f = codec_frames(read_wav(r.path), p);
    Frames next(all.rows() + f.rows(), p.frame);
    next << all, f;
    all = next;
  }
  std::map<std::string, CodebookSet> cbs{{"A", train_codebooks(all, p, 1)}};
  std::filesystem::remove(m.records[3].path);
  const GenerateResult g = generate_fakes(m, {p}, cbs, {}, dir / "fakes", 1);
  EXPECT_EQ(g.failures.size(), 1u);
  EXPECT_EQ(g.manifest.records.size(), 19u);
}
