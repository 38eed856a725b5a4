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

#include <cmath>
#include <codecwb/synthbench.hpp>

using namespace codecwb;

namespace {

struct Projection {
  std::vector<double> proj;
  std::vector<double> y;
};

Projection project(const FeatureTable& t, const Eigen::VectorXd& dir, const std::string& domain) {
  Projection p;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t.domains[i] != domain) continue;
    const auto row = static_cast<Eigen::Index>(i);
    p.proj.push_back(t.features.row(row).cast<double>().dot(dir.transpose()));
    p.y.push_back(t.labels[i] == Label::kBonafide ? 1.0 : -1.0);
  }
  return p;
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) ma += a[i], mb += b[i];
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

int count(const FeatureTable& t, const std::string& domain, Label label) {
  int n = 0;
  for (std::size_t i = 0; i < t.size(); ++i) n += t.domains[i] == domain && t.labels[i] == label;
  return n;
}

}  // namespace

TEST(Synth, SizesAndBalancedLabels) {
  SynthSpec s;
  s.n_large = 301;
  s.n_small = 41;
  s.n_eval = 99;
  const SynthData d = make_synthetic(s);
  EXPECT_EQ(d.train.size(), 342u);
  EXPECT_EQ(d.eval.size(), 99u);
  for (const char* dom : {"L", "S"}) {
    EXPECT_LE(std::abs(count(d.train, dom, Label::kBonafide) - count(d.train, dom, Label::kSpoof)), 1);
  }
  EXPECT_EQ(count(d.eval, "L", Label::kBonafide) + count(d.eval, "L", Label::kSpoof), 0);
  EXPECT_EQ(d.dev.size(), 30u + 4u);
  EXPECT_NO_THROW(d.train.validate());
}

TEST(Synth, DirectionsAreOrthonormal) {
  const SynthData d = make_synthetic(SynthSpec{});
  EXPECT_NEAR(d.u.norm(), 1.0, 1e-12);
  EXPECT_NEAR(d.v.norm(), 1.0, 1e-12);
  EXPECT_NEAR(d.u.dot(d.v), 0.0, 1e-12);
}

TEST(Synth, ShortcutPredictsLabelOnlyInLargeDomain) {
  SynthSpec s;
  s.n_small = 2000;
  const SynthData d = make_synthetic(s);
  const auto large = project(d.train, d.v, "L");
  const auto small = project(d.train, d.v, "S");
  const auto eval = project(d.eval, d.v, "S");
  EXPECT_GT(correlation(large.proj, large.y), 0.5);
  EXPECT_LT(std::abs(correlation(small.proj, small.y)), 0.1);
  EXPECT_LT(std::abs(correlation(eval.proj, eval.y)), 0.1);
}

TEST(Synth, ZeroShortcutMakesDomainsAlike) {
  SynthSpec s;
  s.shortcut_strength = 0.0;
  s.n_small = 2000;
  const SynthData d = make_synthetic(s);
  // With no shortcut both domains are y * signal * u + noise; the mean
  // class-conditional projections on v vanish in either domain.
  for (const char* dom : {"L", "S"}) {
    const auto p = project(d.train, d.v, dom);
    double m = 0;
    for (std::size_t i = 0; i < p.proj.size(); ++i) m += p.proj[i] * p.y[i];
    EXPECT_NEAR(m / static_cast<double>(p.proj.size()), 0.0, 0.1) << dom;
  }
}

TEST(Synth, ProbeOnSharedDirectionMatchesGaussianTail) {
  SynthSpec s;
  s.n_eval = 20000;
  const SynthData d = make_synthetic(s);
  const auto p = project(d.eval, d.u, "S");
  int wrong = 0;
  for (std::size_t i = 0; i < p.proj.size(); ++i) wrong += (p.proj[i] > 0) != (p.y[i] > 0);
  // Error of sign(x.u) is Phi(-signal / sigma).
  const double expected = 0.5 * std::erfc(s.signal_strength / s.noise_sigma / std::sqrt(2.0));
  EXPECT_NEAR(static_cast<double>(wrong) / static_cast<double>(p.proj.size()), expected, 0.01);
}

TEST(Synth, Deterministic) {
  SynthSpec s;
  s.seed = 99;
  const SynthData a = make_synthetic(s), b = make_synthetic(s);
  EXPECT_TRUE(a.train.features == b.train.features);
  EXPECT_TRUE(a.eval.features == b.eval.features);
  s.seed = 100;
  const SynthData c = make_synthetic(s);
  EXPECT_FALSE(a.train.features == c.train.features);
}

TEST(Synth, ValidateRejectsBadSpecs) {
  SynthSpec s;
  s.n_small = 3;
  EXPECT_THROW(make_synthetic(s), InvalidArgument);
  s = SynthSpec{};
  s.n_large = 10;
  s.n_small = 20;
  EXPECT_THROW(s.validate(), InvalidArgument);
  s = SynthSpec{};
  s.noise_sigma = -1;
  EXPECT_THROW(s.validate(), InvalidArgument);
}

TEST(Synth, MedianOddEvenEmpty) {
  EXPECT_EQ(median({3, 1, 2}), 2.0);
  EXPECT_EQ(median({4, 1, 3, 2}), 2.5);
  EXPECT_THROW(median({}), InvalidArgument);
}

TEST(Synth, ComparisonIsDeterministicAndIndependentOfWorkers) {
  SynthSpec s;
  s.n_large = 200;
  s.n_small = 20;
  s.n_eval = 200;
  TrainConfig cfg = synth_train_config(s);
  cfg.epochs = 2;
  const std::vector<Strategy> strategies{Strategy::kErm, Strategy::kCsam};
  const auto a = run_comparison(s, cfg, strategies, 2, 1);
  const auto b = run_comparison(s, cfg, strategies, 2, 2);
  for (Strategy st : strategies) {
    EXPECT_EQ(a.of(st).eval_eer, b.of(st).eval_eer);
  }
  EXPECT_THROW(a.of(Strategy::kSam), InvalidArgument);
}
