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

#include "codecwb/optim.hpp"

#include <algorithm>
#include <map>
#include <ostream>

#include "codecwb/metrics.hpp"

namespace codecwb {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kErm: return "erm";
    case Strategy::kSam: return "sam";
    case Strategy::kAsam: return "asam";
    case Strategy::kCsam: return "csam";
  }
  return "?";
}

Strategy parse_strategy(std::string_view text) {
  if (text == "erm") return Strategy::kErm;
  if (text == "sam") return Strategy::kSam;
  if (text == "asam") return Strategy::kAsam;
  if (text == "csam") return Strategy::kCsam;
  throw InvalidArgument("unknown strategy '" + std::string(text) +
                        "' (expected erm, sam, asam or csam)");
}

std::string_view to_string(SelectionMetric m) {
  return m == SelectionMetric::kDevLoss ? "dev_loss" : "dev_eer";
}

SelectionMetric parse_selection_metric(std::string_view text) {
  if (text == "dev_loss") return SelectionMetric::kDevLoss;
  if (text == "dev_eer") return SelectionMetric::kDevEer;
  throw InvalidArgument("unknown selection metric '" + std::string(text) + "'");
}

void SamConfig::validate() const {
  if (two_pass() && !(rho > 0.0)) throw InvalidArgument("sam: rho must be > 0");
  if (!(asam_eta >= 0.0)) throw InvalidArgument("sam: asam_eta must be >= 0");
}

void TrainConfig::validate() const {
  if (!(base_lr > 0.0)) throw InvalidArgument("train: base_lr must be > 0");
  if (epochs < 1) throw InvalidArgument("train: epochs must be >= 1");
  if (halve_every < 1) throw InvalidArgument("train: halve_every must be >= 1");
  if (batch_size < 2) throw InvalidArgument("train: batch_size must be >= 2");
  if (!(class_weights.bonafide > 0.0 && class_weights.spoof > 0.0)) {
    throw InvalidArgument("train: class weights must be > 0");
  }
  sam.validate();
  validate_arch(arch);
}

double lr_at(int epoch, const TrainConfig& cfg) {
  if (epoch < 0) throw InvalidArgument("lr_at: negative epoch");
  return cfg.base_lr * std::ldexp(1.0, -(epoch / cfg.halve_every));
}

template <typename T>
Perturbation<T> sam_perturbation(const Vec<T>& theta, const Vec<T>& grad,
                                 const SamConfig& cfg) {
  if (theta.size() != grad.size()) throw InvalidArgument("sam_perturbation: shape mismatch");
  Perturbation<T> out;
  const Eigen::VectorXd g = grad.template cast<double>();
  if (cfg.variant == Strategy::kAsam) {
    const Eigen::ArrayXd scale = theta.template cast<double>().array().abs() + cfg.asam_eta;
    const double norm = (scale * g.array()).matrix().norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      out.eps = Vec<T>::Zero(theta.size());
      out.skipped = true;
      return out;
    }
    out.eps = (cfg.rho * scale.square() * g.array() / norm).matrix().template cast<T>();
    return out;
  }
  const double norm = g.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    out.eps = Vec<T>::Zero(theta.size());
    out.skipped = true;
    return out;
  }
  out.eps = (cfg.rho / norm * g).template cast<T>();
  return out;
}

template <typename T>
StepGradient<T> step_gradient(const Vec<T>& theta, const Objective<T>& objective,
                              const SamConfig& cfg) {
  LossGrad<T> first = objective(theta);
  StepGradient<T> out;
  if (!cfg.two_pass()) {
    out.loss = first.loss;
    out.grad = std::move(first.grad);
    return out;
  }
  const auto perturbation = sam_perturbation(theta, first.grad, cfg);
  if (perturbation.skipped) {
    out.loss = first.loss;
    out.grad = std::move(first.grad);
    out.perturbation_skipped = true;
    return out;
  }
  const Vec<T> shifted = theta + perturbation.eps;
  LossGrad<T> second = objective(shifted);
  out.loss = second.loss;
  out.grad = std::move(second.grad);
  return out;
}

template Perturbation<float> sam_perturbation<float>(const Vec<float>&, const Vec<float>&,
                                                     const SamConfig&);
template Perturbation<double> sam_perturbation<double>(const Vec<double>&,
                                                       const Vec<double>&, const SamConfig&);
template StepGradient<float> step_gradient<float>(const Vec<float>&, const Objective<float>&,
                                                  const SamConfig&);
template StepGradient<double> step_gradient<double>(const Vec<double>&,
                                                    const Objective<double>&,
                                                    const SamConfig&);

StepReport train_step(ModelParams& p, AdamState<float>& state, const Batch<float>& x,
                      std::span<const Label> labels, const TrainConfig& cfg, double lr) {
  ModelParams scratch = p;
  const Objective<float> objective = [&](const Vec<float>& theta) {
    scratch.flat = theta;
    return loss_and_grad(scratch, x, labels, cfg.class_weights);
  };
  auto g = step_gradient(p.flat, objective, cfg.sam);
  adam_step(state, p.flat, g.grad, lr);
  return {static_cast<double>(g.loss), g.perturbation_skipped};
}

void FeatureTable::validate() const {
  const auto n = static_cast<Eigen::Index>(labels.size());
  if (features.rows() != n || domains.size() != labels.size() || ids.size() != labels.size()) {
    throw InvalidArgument("FeatureTable: column lengths differ");
  }
}

FeatureTable FeatureTable::select(std::span<const std::size_t> rows) const {
  FeatureTable out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) =
        features.row(static_cast<Eigen::Index>(rows[i]));
    out.labels.push_back(labels[rows[i]]);
    out.domains.push_back(domains[rows[i]]);
    out.ids.push_back(ids[rows[i]]);
  }
  return out;
}

DevEvaluation evaluate_dev(const ModelParams& p, const FeatureTable& dev,
                           const ClassWeights& w) {
  DevEvaluation out;
  out.loss = static_cast<double>(loss_only(p, dev.features, dev.labels, w));
  const Vec<float> prob = bonafide_probability(p, dev.features);
  std::vector<double> bona, spoof;
  for (std::size_t i = 0; i < dev.size(); ++i) {
    (dev.labels[i] == Label::kBonafide ? bona : spoof)
        .push_back(static_cast<double>(prob(static_cast<Eigen::Index>(i))));
  }
  out.eer = (bona.empty() || spoof.empty()) ? 0.0 : compute_eer(bona, spoof).eer;
  return out;
}

TrainResult train(const FeatureTable& train_set, const FeatureTable& dev_set,
                  const TrainConfig& cfg,
                  const std::function<void(const EpochRecord&)>& on_epoch) {
  cfg.validate();
  train_set.validate();
  dev_set.validate();
  if (dev_set.size() == 0) throw InvalidArgument("train: empty dev set");
  const bool has_bona = std::count(train_set.labels.begin(), train_set.labels.end(),
                                   Label::kBonafide) > 0;
  const bool has_spoof = std::count(train_set.labels.begin(), train_set.labels.end(),
                                    Label::kSpoof) > 0;
  if (!has_bona || !has_spoof) {
    throw InvalidArgument("train: training data must contain both labels");
  }
  if (train_set.features.cols() != cfg.arch.front()) {
    throw InvalidArgument("train: feature dim " + std::to_string(train_set.features.cols()) +
                          " != arch input " + std::to_string(cfg.arch.front()));
  }

  TrainResult result;
  if (cfg.sam.variant == Strategy::kCsam) {
    std::map<std::string, std::int64_t> sizes;
    for (const auto& d : train_set.domains) ++sizes[d];
    result.plan = batch_counts(sizes, cfg.batch_size);
  }

  ModelParams p = init_params<float>(cfg.seed, cfg.arch);
  fit_standardization(p, train_set.features);
  auto state = AdamState<float>::zeros(p.flat.size());
  const auto batch_seed = derive_seed(cfg.seed, "batching");

  Batch<float> xb;
  std::vector<Label> yb;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = lr_at(epoch, cfg);
    const auto batches =
        result.plan ? make_batches(train_set.domains, *result.plan, batch_seed, epoch)
                    : make_uniform_batches(train_set.size(), cfg.batch_size, batch_seed, epoch);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = lr;
    double loss_sum = 0.0;
    for (const auto& batch : batches) {
      xb.resize(static_cast<Eigen::Index>(batch.size()), train_set.features.cols());
      yb.clear();
      for (std::size_t i = 0; i < batch.size(); ++i) {
        xb.row(static_cast<Eigen::Index>(i)) =
            train_set.features.row(static_cast<Eigen::Index>(batch[i]));
        yb.push_back(train_set.labels[batch[i]]);
      }
      const auto step = train_step(p, state, xb, yb, cfg, lr);
      loss_sum += step.loss;
      rec.skipped_perturbations += step.perturbation_skipped ? 1 : 0;
    }
    rec.train_loss = batches.empty() ? 0.0 : loss_sum / static_cast<double>(batches.size());
    const auto dev = evaluate_dev(p, dev_set, cfg.class_weights);
    rec.dev_loss = dev.loss;
    rec.dev_eer = dev.eer;
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);

    const double metric =
        cfg.selection_metric == SelectionMetric::kDevLoss ? dev.loss : dev.eer;
    if (result.best_epoch < 0 || metric < result.best_metric) {
      result.best_epoch = epoch;
      result.best_metric = metric;
      result.best = p;
      result.best_state = state;
    }
  }
  return result;
}

void write_history_csv(std::ostream& out, const std::vector<EpochRecord>& history) {
  out << "epoch,lr,train_loss,dev_loss,dev_eer\n";
  for (const auto& r : history) {
    out << r.epoch << ',' << format_double(r.lr) << ',' << format_double(r.train_loss) << ','
        << format_double(r.dev_loss) << ',' << format_double(r.dev_eer) << '\n';
  }
}

}  // namespace codecwb
