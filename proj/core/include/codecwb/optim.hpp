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

#include <cmath>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "codecwb/detector.hpp"
#include "codecwb/sampler.hpp"

namespace codecwb {

enum class Strategy { kErm, kSam, kAsam, kCsam };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view text);  // "erm", "sam", "asam", "csam"

struct SamConfig {
  Strategy variant = Strategy::kErm;
  double rho = 0.05;
  double asam_eta = 0.01;

  bool two_pass() const { return variant != Strategy::kErm; }
  void validate() const;
};

enum class SelectionMetric { kDevLoss, kDevEer };

std::string_view to_string(SelectionMetric m);
SelectionMetric parse_selection_metric(std::string_view text);

struct TrainConfig {
  double base_lr = 5e-4;
  int epochs = 10;
  int halve_every = 2;
  int batch_size = 32;
  ClassWeights class_weights;
  std::uint64_t seed = 0;
  SamConfig sam;
  SelectionMetric selection_metric = SelectionMetric::kDevLoss;
  Arch arch = kDefaultArch;

  void validate() const;
};

// base_lr * 0.5^floor(epoch / halve_every), epoch counted from 0.
double lr_at(int epoch, const TrainConfig& cfg);

template <typename T>
struct AdamState {
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  Vec<T> m;
  Vec<T> v;
  std::int64_t t = 0;

  static AdamState zeros(Eigen::Index n) {
    return {Vec<T>::Zero(n), Vec<T>::Zero(n), 0};
  }
};

// Bias-corrected Adam, in place.
template <typename T>
void adam_step(AdamState<T>& state, Vec<T>& params, const Vec<T>& grad, double lr) {
  if (state.m.size() != params.size() || grad.size() != params.size()) {
    throw InvalidArgument("adam_step: shape mismatch");
  }
  using S = AdamState<T>;
  ++state.t;
  const auto b1 = static_cast<T>(S::kBeta1);
  const auto b2 = static_cast<T>(S::kBeta2);
  state.m = b1 * state.m + (T(1) - b1) * grad;
  state.v = b2 * state.v + (T(1) - b2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(S::kBeta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(S::kBeta2, static_cast<double>(state.t));
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    const double m_hat = static_cast<double>(state.m(i)) / c1;
    const double v_hat = static_cast<double>(state.v(i)) / c2;
    params(i) = static_cast<T>(static_cast<double>(params(i)) -
                               lr * m_hat / (std::sqrt(v_hat) + S::kEps));
  }
}

template <typename T>
struct Perturbation {
  Vec<T> eps;
  bool skipped = false;  // zero gradient: eps is all zeros
};

// sam/csam: rho * g / ||g||. asam: rho * T^2 g / ||T g|| with
// T = |theta| + asam_eta elementwise.
template <typename T>
Perturbation<T> sam_perturbation(const Vec<T>& theta, const Vec<T>& grad,
                                 const SamConfig& cfg);

template <typename T>
using Objective = std::function<LossGrad<T>(const Vec<T>& theta)>;

template <typename T>
struct StepGradient {
  T loss{};      // pass-2 loss for two-pass strategies
  Vec<T> grad;   // gradient to apply at the original theta
  bool perturbation_skipped = false;
};

// ERM: objective at theta. Two-pass strategies: objective at theta, ascent
// vector, objective at a copy theta + eps. theta itself is never modified.
template <typename T>
StepGradient<T> step_gradient(const Vec<T>& theta, const Objective<T>& objective,
                              const SamConfig& cfg);

struct StepReport {
  double loss = 0.0;
  bool perturbation_skipped = false;
};

// One optimizer step of the configured strategy on a batch.
StepReport train_step(ModelParams& p, AdamState<float>& state, const Batch<float>& x,
                      std::span<const Label> labels, const TrainConfig& cfg, double lr);

// In-memory features for training and evaluation.
struct FeatureTable {
  Batch<float> features;  // one row per utterance
  std::vector<Label> labels;
  std::vector<std::string> domains;
  std::vector<std::string> ids;

  std::size_t size() const { return labels.size(); }
  void validate() const;
  FeatureTable select(std::span<const std::size_t> rows) const;
};

struct EpochRecord {
  int epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;  // mean reported step loss
  double dev_loss = 0.0;
  double dev_eer = 0.0;
  int skipped_perturbations = 0;
};

struct TrainResult {
  ModelParams best;
  AdamState<float> best_state;
  int best_epoch = -1;
  double best_metric = 0.0;
  std::vector<EpochRecord> history;
  std::optional<DomainPlan> plan;  // csam only
};

struct DevEvaluation {
  double loss = 0.0;
  double eer = 0.0;
};

DevEvaluation evaluate_dev(const ModelParams& p, const FeatureTable& dev,
                           const ClassWeights& w);

// Trains from init_params(cfg.seed, cfg.arch) and returns the
// epoch with the best selection metric (ties go to the earlier epoch).
TrainResult train(const FeatureTable& train_set, const FeatureTable& dev_set,
                  const TrainConfig& cfg,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

void write_history_csv(std::ostream& out, const std::vector<EpochRecord>& history);

}  // namespace codecwb
