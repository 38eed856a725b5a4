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

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

#include "codecwb/common.hpp"
#include "codecwb/features.hpp"

namespace codecwb {

// Layer sizes, input first. The last entry must be 2 (bonafide, spoof).
using Arch = std::vector<int>;

// 80 mel means + 80 mel stds -> 128 -> 64 -> 2.
inline const Arch kDefaultArch{160, 128, 64, 2};

template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
// One example per row.
template <typename T>
using Batch = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::size_t param_count(const Arch& arch);
void validate_arch(const Arch& arch);

// MLP with ReLU after every hidden layer. All trainable values live in one
// flat vector: for each layer, the [out x in] weight matrix (column-major)
// followed by the bias. Inputs are standardized with the fixed per-feature
// affine map (x - in_shift) * in_scale before the first layer; those two
// vectors are not trained.
template <typename T>
struct BasicParams {
  Arch arch;
  std::uint64_t seed = 0;
  Vec<T> flat;
  Vec<T> in_shift;
  Vec<T> in_scale;

  int num_layers() const { return static_cast<int>(arch.size()) - 1; }
  int input_dim() const { return arch.front(); }
  std::size_t weight_offset(int layer) const;
  std::size_t bias_offset(int layer) const;

  Eigen::Map<Mat<T>> weight(int layer);
  Eigen::Map<const Mat<T>> weight(int layer) const;
  Eigen::Map<Vec<T>> bias(int layer);
  Eigen::Map<const Vec<T>> bias(int layer) const;

  void validate() const;
};

using ModelParams = BasicParams<float>;

// Glorot-uniform weights, zero biases, identity standardization.
template <typename T>
BasicParams<T> init_params(std::uint64_t seed, const Arch& arch = kDefaultArch);

template <typename T>
Mat<T> forward(const BasicParams<T>& p, const Batch<T>& x);  // [batch x 2]

struct ClassWeights {
  double bonafide = 10.0;
  double spoof = 1.0;

  double of(Label y) const { return y == Label::kBonafide ? bonafide : spoof; }
};

template <typename T>
struct LossGrad {
  T loss{};
  Vec<T> grad;  // same layout as BasicParams::flat
};

// (1/B) * sum_i w(y_i) * -log softmax(logits_i)[y_i].
template <typename T>
LossGrad<T> loss_and_grad(const BasicParams<T>& p, const Batch<T>& x,
                          std::span<const Label> labels, const ClassWeights& w);

template <typename T>
T loss_only(const BasicParams<T>& p, const Batch<T>& x,
            std::span<const Label> labels, const ClassWeights& w);

// softmax(logits)[bonafide] per row.
template <typename T>
Vec<T> bonafide_probability(const BasicParams<T>& p, const Batch<T>& x);

double score_features(const ModelParams& p, const FeatureVector& f);
// P(bonafide) on pool_stats(m); always in [0, 1].
double score(const ModelParams& p, const MelSpectrogram& m);

// Sets in_shift/in_scale to the per-column mean and 1/std of `x` (std
// floored to keep constant columns finite).
template <typename T>
void fit_standardization(BasicParams<T>& p, const Batch<T>& x);

}  // namespace codecwb
