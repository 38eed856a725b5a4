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

#include "codecwb/synthbench.hpp"

#include <algorithm>
#include <cmath>

#include "codecwb/metrics.hpp"
#include "codecwb/thread_pool.hpp"

namespace codecwb {
namespace {

Eigen::VectorXd random_unit(Rng& rng, int dim) {
  Eigen::VectorXd x(dim);
  for (int i = 0; i < dim; ++i) x(i) = rng.normal();
  return x.normalized();
}

// Appends n samples of one domain, labels alternating bonafide/spoof.
void draw(FeatureTable& t, const SynthSpec& s, const Eigen::VectorXd& u,
          const Eigen::VectorXd& v, bool shortcut_follows_label, int n,
          const std::string& domain, Rng& rng) {
  const auto start = t.features.rows();
  t.features.conservativeResize(start + n, s.dim);
  for (int i = 0; i < n; ++i) {
    const Label label = i % 2 == 0 ? Label::kBonafide : Label::kSpoof;
    const double y = label == Label::kBonafide ? 1.0 : -1.0;
    const double r = shortcut_follows_label ? y : rng.rademacher();
    Eigen::VectorXd x = y * s.signal_strength * u + r * s.shortcut_strength * v;
    for (int j = 0; j < s.dim; ++j) x(j) += s.noise_sigma * rng.normal();
    t.features.row(start + i) = x.cast<float>().transpose();
    t.labels.push_back(label);
    t.domains.push_back(domain);
    t.ids.push_back(domain + std::to_string(t.ids.size()));
  }
}

}  // namespace

void SynthSpec::validate() const {
  if (dim < 2) throw InvalidArgument("synth: dim must be >= 2");
  if (n_small < 4 || n_large < n_small) {
    throw InvalidArgument("synth: need n_large >= n_small >= 4");
  }
  if (n_eval < 2) throw InvalidArgument("synth: n_eval must be >= 2");
  if (!(shortcut_strength >= 0.0 && signal_strength >= 0.0 && noise_sigma >= 0.0)) {
    throw InvalidArgument("synth: strengths and noise must be >= 0");
  }
}

SynthSpec SynthSpec::corpus_ratio() {
  SynthSpec s;
  s.n_large = 2000;
  s.n_small = 69;  // 2000 / 69 ~ 740747 / 25380
  return s;
}

SynthData make_synthetic(const SynthSpec& spec) {
  spec.validate();
  SynthData d;
  Rng dir_rng(derive_seed(spec.seed, "synth/directions"));
  d.u = random_unit(dir_rng, spec.dim);
  Eigen::VectorXd v = random_unit(dir_rng, spec.dim);
  v -= v.dot(d.u) * d.u;
  d.v = v.normalized();

  Rng train_rng(derive_seed(spec.seed, "synth/train"));
  draw(d.train, spec, d.u, d.v, true, spec.n_large, "L", train_rng);
  draw(d.train, spec, d.u, d.v, false, spec.n_small, "S", train_rng);

  Rng dev_rng(derive_seed(spec.seed, "synth/dev"));
  draw(d.dev, spec, d.u, d.v, true, std::max(2, spec.n_large / 10), "L", dev_rng);
  draw(d.dev, spec, d.u, d.v, false, std::max(2, spec.n_small / 10), "S", dev_rng);

  Rng eval_rng(derive_seed(spec.seed, "synth/eval"));
  draw(d.eval, spec, d.u, d.v, false, spec.n_eval, "S", eval_rng);
  return d;
}

TrainConfig synth_train_config(const SynthSpec& spec) {
  TrainConfig cfg;
  cfg.arch = {spec.dim, 16, 2};
  cfg.base_lr = 5e-3;
  cfg.epochs = 10;
  cfg.halve_every = 2;
  cfg.batch_size = 4;
  cfg.class_weights = {1.0, 1.0};
  cfg.sam.rho = 0.1;
  cfg.selection_metric = SelectionMetric::kDevLoss;
  cfg.seed = spec.seed;
  return cfg;
}

const StrategyOutcome& SynthComparison::of(Strategy s) const {
  for (const auto& o : outcomes) {
    if (o.strategy == s) return o;
  }
  throw InvalidArgument("synth: strategy " + std::string(to_string(s)) + " was not run");
}

double median(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("median of empty set");
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

SynthComparison run_comparison(const SynthSpec& spec, const TrainConfig& cfg,
                               std::span<const Strategy> strategies, int n_seeds,
                               int workers) {
  if (n_seeds < 1) throw InvalidArgument("synth: n_seeds must be >= 1");
  const auto n_strat = strategies.size();
  std::vector<SynthData> data(static_cast<std::size_t>(n_seeds));
  parallel_for(data.size(), workers, [&](std::size_t k) {
    SynthSpec s = spec;
    s.seed = derive_seed(spec.seed, "synth/data", k);
    data[k] = make_synthetic(s);
  });

  std::vector<double> eers(n_strat * data.size());
  parallel_for(eers.size(), workers, [&](std::size_t job) {
    const std::size_t k = job / n_strat;
    TrainConfig c = cfg;
    c.seed = derive_seed(spec.seed, "synth/train", k);
    c.sam.variant = strategies[job % n_strat];
    const auto result = train(data[k].train, data[k].dev, c);
    const auto& eval = data[k].eval;
    const Vec<float> prob = bonafide_probability(result.best, eval.features);
    std::vector<double> bona, spoof;
    for (std::size_t i = 0; i < eval.size(); ++i) {
      (eval.labels[i] == Label::kBonafide ? bona : spoof)
          .push_back(static_cast<double>(prob(static_cast<Eigen::Index>(i))));
    }
    eers[job] = compute_eer(bona, spoof).eer;
  });

  SynthComparison out;
  for (std::size_t s = 0; s < n_strat; ++s) {
    StrategyOutcome o;
    o.strategy = strategies[s];
    for (std::size_t k = 0; k < data.size(); ++k) o.eval_eer.push_back(eers[k * n_strat + s]);
    o.median = median(o.eval_eer);
    out.outcomes.push_back(std::move(o));
  }
  return out;
}

}  // namespace codecwb
