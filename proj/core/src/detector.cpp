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

#include "codecwb/detector.hpp"

#include <cmath>
#include <string>

namespace codecwb {
namespace {

template <typename T>
void check_batch(const BasicParams<T>& p, const Batch<T>& x) {
  if (x.rows() == 0) throw InvalidArgument("detector: empty batch");
  if (x.cols() != p.input_dim()) {
    throw InvalidArgument("detector: feature dim " + std::to_string(x.cols()) +
                          " != model input " + std::to_string(p.input_dim()));
  }
}

template <typename T>
Mat<T> standardize(const BasicParams<T>& p, const Batch<T>& x) {
  Mat<T> a = x;
  a.rowwise() -= p.in_shift.transpose();
  a.array().rowwise() *= p.in_scale.transpose().array();
  return a;
}

// Row-wise log-sum-exp and softmax with max subtraction.
template <typename T>
void softmax_rows(const Mat<T>& z, Vec<T>& lse, Mat<T>& prob) {
  lse.resize(z.rows());
  prob.resize(z.rows(), z.cols());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const T m = z.row(i).maxCoeff();
    T s = 0;
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
      prob(i, j) = std::exp(z(i, j) - m);
      s += prob(i, j);
    }
    prob.row(i) /= s;
    lse(i) = m + std::log(s);
  }
}

template <typename T>
void check_labels(const Batch<T>& x, std::span<const Label> labels) {
  if (static_cast<Eigen::Index>(labels.size()) != x.rows()) {
    throw InvalidArgument("detector: " + std::to_string(labels.size()) + " labels for " +
                          std::to_string(x.rows()) + " rows");
  }
}

}  // namespace

std::size_t param_count(const Arch& arch) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < arch.size(); ++l) {
    n += static_cast<std::size_t>(arch[l + 1]) * (static_cast<std::size_t>(arch[l]) + 1);
  }
  return n;
}

void validate_arch(const Arch& arch) {
  if (arch.size() < 2) throw InvalidArgument("arch needs at least input and output sizes");
  for (int s : arch) {
    if (s < 1) throw InvalidArgument("arch: layer sizes must be >= 1");
  }
  if (arch.back() != 2) throw InvalidArgument("arch must end with 2 outputs");
}

template <typename T>
std::size_t BasicParams<T>::weight_offset(int layer) const {
  std::size_t off = 0;
  for (int l = 0; l < layer; ++l) {
    off += static_cast<std::size_t>(arch[l + 1]) * (static_cast<std::size_t>(arch[l]) + 1);
  }
  return off;
}

template <typename T>
std::size_t BasicParams<T>::bias_offset(int layer) const {
  return weight_offset(layer) +
         static_cast<std::size_t>(arch[layer + 1]) * static_cast<std::size_t>(arch[layer]);
}

template <typename T>
Eigen::Map<Mat<T>> BasicParams<T>::weight(int layer) {
  return {flat.data() + weight_offset(layer), arch[layer + 1], arch[layer]};
}
template <typename T>
Eigen::Map<const Mat<T>> BasicParams<T>::weight(int layer) const {
  return {flat.data() + weight_offset(layer), arch[layer + 1], arch[layer]};
}
template <typename T>
Eigen::Map<Vec<T>> BasicParams<T>::bias(int layer) {
  return {flat.data() + bias_offset(layer), arch[layer + 1]};
}
template <typename T>
Eigen::Map<const Vec<T>> BasicParams<T>::bias(int layer) const {
  return {flat.data() + bias_offset(layer), arch[layer + 1]};
}

template <typename T>
void BasicParams<T>::validate() const {
  validate_arch(arch);
  if (static_cast<std::size_t>(flat.size()) != param_count(arch)) {
    throw InvalidArgument("params: flat size does not match arch");
  }
  if (in_shift.size() != arch.front() || in_scale.size() != arch.front()) {
    throw InvalidArgument("params: standardization size does not match input dim");
  }
  if (!flat.allFinite() || !in_shift.allFinite() || !in_scale.allFinite()) {
    throw InvalidArgument("params: non-finite value");
  }
}

template <typename T>
BasicParams<T> init_params(std::uint64_t seed, const Arch& arch) {
  validate_arch(arch);
  BasicParams<T> p;
  p.arch = arch;
  p.seed = seed;
  p.flat = Vec<T>::Zero(static_cast<Eigen::Index>(param_count(arch)));
  p.in_shift = Vec<T>::Zero(arch.front());
  p.in_scale = Vec<T>::Ones(arch.front());
  Rng rng(derive_seed(seed, "init"));
  for (int l = 0; l < p.num_layers(); ++l) {
    const double limit = std::sqrt(6.0 / (arch[l] + arch[l + 1]));
    auto w = p.weight(l);
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      for (Eigen::Index r = 0; r < w.rows(); ++r) {
        w(r, c) = static_cast<T>(rng.uniform(-limit, limit));
      }
    }
  }
  return p;
}

template <typename T>
Mat<T> forward(const BasicParams<T>& p, const Batch<T>& x) {
  check_batch(p, x);
  Mat<T> a = standardize(p, x);
  for (int l = 0; l < p.num_layers(); ++l) {
    Mat<T> z = a * p.weight(l).transpose();
    z.rowwise() += p.bias(l).transpose();
    if (l + 1 < p.num_layers()) z = z.cwiseMax(T(0));
    a = std::move(z);
  }
  return a;
}

template <typename T>
LossGrad<T> loss_and_grad(const BasicParams<T>& p, const Batch<T>& x,
                          std::span<const Label> labels, const ClassWeights& w) {
  check_batch(p, x);
  check_labels(x, labels);
  const int L = p.num_layers();
  const auto B = x.rows();

  // Keep every layer's input activation; hidden pre-activations are only
  // needed through their sign, which the post-ReLU activation preserves.
  std::vector<Mat<T>> acts;
  acts.reserve(static_cast<std::size_t>(L));
  acts.push_back(standardize(p, x));
  Mat<T> z;
  for (int l = 0; l < L; ++l) {
    z.noalias() = acts.back() * p.weight(l).transpose();
    z.rowwise() += p.bias(l).transpose();
    if (l + 1 < L) acts.push_back(z.cwiseMax(T(0)));
  }

  Vec<T> lse;
  Mat<T> prob;
  softmax_rows(z, lse, prob);

  LossGrad<T> out;
  out.grad = Vec<T>::Zero(p.flat.size());
  const T inv_b = T(1) / static_cast<T>(B);
  Mat<T> dz = prob;
  T loss = 0;
  for (Eigen::Index i = 0; i < B; ++i) {
    const auto y = static_cast<Eigen::Index>(labels[static_cast<std::size_t>(i)]);
    const T wi = static_cast<T>(w.of(labels[static_cast<std::size_t>(i)]));
    loss += wi * (lse(i) - z(i, y));
    dz(i, y) -= T(1);
    dz.row(i) *= wi * inv_b;
  }
  out.loss = loss * inv_b;

  for (int l = L - 1; l >= 0; --l) {
    const Mat<T>& a = acts[static_cast<std::size_t>(l)];
    Eigen::Map<Mat<T>> gw(out.grad.data() + p.weight_offset(l), p.arch[l + 1], p.arch[l]);
    Eigen::Map<Vec<T>> gb(out.grad.data() + p.bias_offset(l), p.arch[l + 1]);
    gw.noalias() = dz.transpose() * a;
    gb = dz.colwise().sum().transpose();
    if (l > 0) {
      Mat<T> da = dz * p.weight(l);
      dz = (a.array() > T(0)).select(da, T(0));
    }
  }
  return out;
}

template <typename T>
T loss_only(const BasicParams<T>& p, const Batch<T>& x,
            std::span<const Label> labels, const ClassWeights& w) {
  check_labels(x, labels);
  const Mat<T> z = forward(p, x);
  Vec<T> lse;
  Mat<T> prob;
  softmax_rows(z, lse, prob);
  T loss = 0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const auto y = static_cast<Eigen::Index>(labels[static_cast<std::size_t>(i)]);
    loss += static_cast<T>(w.of(labels[static_cast<std::size_t>(i)])) * (lse(i) - z(i, y));
  }
  return loss / static_cast<T>(z.rows());
}

template <typename T>
Vec<T> bonafide_probability(const BasicParams<T>& p, const Batch<T>& x) {
  const Mat<T> z = forward(p, x);
  Vec<T> out(z.rows());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    // 1 / (1 + exp(z1 - z0)), written to stay finite for large gaps.
    const T d = z(i, 1) - z(i, 0);
    out(i) = d > 0 ? std::exp(-d) / (T(1) + std::exp(-d)) : T(1) / (T(1) + std::exp(d));
  }
  return out;
}

double score_features(const ModelParams& p, const FeatureVector& f) {
  Batch<float> x = f.cast<float>().transpose();
  return static_cast<double>(bonafide_probability(p, x)(0));
}

double score(const ModelParams& p, const MelSpectrogram& m) {
  return score_features(p, pool_stats(m));
}

template <typename T>
void fit_standardization(BasicParams<T>& p, const Batch<T>& x) {
  if (x.rows() == 0 || x.cols() != p.input_dim()) {
    throw InvalidArgument("fit_standardization: bad feature table shape");
  }
  const Eigen::VectorXd mean = x.template cast<double>().colwise().mean().transpose();
  Eigen::VectorXd scale(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double var =
        (x.col(j).template cast<double>().array() - mean(j)).square().mean();
    scale(j) = 1.0 / std::max(std::sqrt(var), 1e-6);
  }
  p.in_shift = mean.cast<T>();
  p.in_scale = scale.cast<T>();
}

#define CODECWB_INSTANTIATE(T)                                                  \
  template struct BasicParams<T>;                                               \
  template BasicParams<T> init_params<T>(std::uint64_t, const Arch&);           \
  template Mat<T> forward<T>(const BasicParams<T>&, const Batch<T>&);           \
  template LossGrad<T> loss_and_grad<T>(const BasicParams<T>&, const Batch<T>&, \
                                        std::span<const Label>,                 \
                                        const ClassWeights&);                   \
  template T loss_only<T>(const BasicParams<T>&, const Batch<T>&,               \
                          std::span<const Label>, const ClassWeights&);         \
  template Vec<T> bonafide_probability<T>(const BasicParams<T>&,                \
                                          const Batch<T>&);                     \
  template void fit_standardization<T>(BasicParams<T>&, const Batch<T>&);

CODECWB_INSTANTIATE(float)
CODECWB_INSTANTIATE(double)
#undef CODECWB_INSTANTIATE

}  // namespace codecwb
