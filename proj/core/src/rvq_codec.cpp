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

#include "codecwb/rvq_codec.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include "codecwb/common.hpp"

namespace codecwb {
namespace {

using RowMatF =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr char kCodebookMagic[] = "CODECWB-CODEBOOK";
constexpr int kCodebookVersion = 1;
constexpr Eigen::Index kSearchBlock = 512;

// Orthonormal DCT-II basis; row k is basis vector k.
std::shared_ptr<const Eigen::MatrixXd> dct_matrix(int n) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const Eigen::MatrixXd>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) {
    auto m = std::make_shared<Eigen::MatrixXd>(n, n);
    const double a0 = std::sqrt(1.0 / n);
    const double ak = std::sqrt(2.0 / n);
    for (int k = 0; k < n; ++k) {
      for (int t = 0; t < n; ++t) {
        (*m)(k, t) = (k == 0 ? a0 : ak) *
                     std::cos(std::numbers::pi * (t + 0.5) * k / n);
      }
    }
    slot = std::move(m);
  }
  return slot;
}

// Nearest centroid for each row of x under ||x - c||^2 = ||x||^2 + ||c||^2 -
// 2 x.c; ||x||^2 is constant per row and dropped. Ties go to the lowest index.
void nearest_centroids(const RowMatF& x, const Codebook& centroids,
                       const Eigen::VectorXf& norms,
                       std::vector<std::int32_t>& out) {
  const Eigen::Index n = x.rows();
  const Eigen::Index k = centroids.rows();
  out.resize(static_cast<std::size_t>(n));
  Eigen::MatrixXf dots;
  for (Eigen::Index r0 = 0; r0 < n; r0 += kSearchBlock) {
    const Eigen::Index rows = std::min(kSearchBlock, n - r0);
    dots.noalias() = x.middleRows(r0, rows) * centroids.transpose();
    for (Eigen::Index i = 0; i < rows; ++i) {
      std::int32_t best = 0;
      float best_score = norms(0) - 2.0f * dots(i, 0);
      for (Eigen::Index j = 1; j < k; ++j) {
        const float s = norms(j) - 2.0f * dots(i, j);
        if (s < best_score) {
          best_score = s;
          best = static_cast<std::int32_t>(j);
        }
      }
      out[static_cast<std::size_t>(r0 + i)] = best;
    }
  }
}

// One RVQ stage: choose a centroid per residual row and subtract it. With a
// pinned zero codeword, a nonzero choice is kept only if it strictly lowers
// the row's squared norm when re-checked in double precision.
void quantize_stage(Frames& residual, const Codebook& centroids,
                    bool pinned_zero, std::vector<std::int32_t>& chosen) {
  const RowMatF x = residual.cast<float>();
  const Eigen::VectorXf norms = centroids.rowwise().squaredNorm();
  nearest_centroids(x, centroids, norms, chosen);
  for (Eigen::Index i = 0; i < residual.rows(); ++i) {
    auto& j = chosen[static_cast<std::size_t>(i)];
    const auto c = centroids.row(j).cast<double>();
    if (pinned_zero && j != 0) {
      const double before = residual.row(i).squaredNorm();
      const double after = (residual.row(i) - c).squaredNorm();
      if (!(after < before)) {
        j = 0;
        continue;
      }
    }
    residual.row(i) -= c;
  }
}

double mean_energy(const Frames& f) {
  return f.rows() == 0 ? 0.0 : f.rowwise().squaredNorm().mean();
}

Codebook kmeans(const RowMatF& x, Eigen::Index k, int iterations, Rng& rng,
                bool pinned_zero, bool& ran_out) {
  const Eigen::Index n = x.rows();
  const Eigen::Index dim = x.cols();
  const Eigen::VectorXf x_norms = x.rowwise().squaredNorm();
  Codebook c = Codebook::Zero(k, dim);
  std::vector<double> min_dist(static_cast<std::size_t>(n));

  auto absorb = [&](Eigen::Index j) {
    const Eigen::VectorXf dots = x * c.row(j).transpose();
    const float cn = c.row(j).squaredNorm();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = std::max(0.0f, x_norms(i) + cn - 2.0f * dots(i));
      auto& m = min_dist[static_cast<std::size_t>(i)];
      if (j == 0 || d < m) m = d;
    }
  };

  // k-means++ seeding (from the origin when the zero codeword is pinned).
  if (pinned_zero) {
    absorb(0);
  } else {
    c.row(0) = x.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))));
    absorb(0);
  }
  for (Eigen::Index j = 1; j < k; ++j) {
    double total = 0.0;
    for (double d : min_dist) total += d;
    Eigen::Index pick = 0;
    if (!(total > 0.0)) {
      ran_out = true;
      pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
    } else {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      pick = -1;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double d = min_dist[static_cast<std::size_t>(i)];
        if (d <= 0.0) continue;
        acc += d;
        pick = i;
        if (acc > target) break;
      }
    }
    c.row(j) = x.row(pick);
    absorb(j);
  }

  // Lloyd iterations; stop early once assignments are stable.
  std::vector<std::int32_t> assign, previous;
  Eigen::MatrixXd sums(k, dim);
  std::vector<std::size_t> counts(static_cast<std::size_t>(k));
  for (int it = 0; it < iterations; ++it) {
    const Eigen::VectorXf norms = c.rowwise().squaredNorm();
    nearest_centroids(x, c, norms, assign);
    if (assign == previous) break;
    sums.setZero();
    std::fill(counts.begin(), counts.end(), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto j = assign[static_cast<std::size_t>(i)];
      sums.row(j) += x.row(i).cast<double>();
      ++counts[static_cast<std::size_t>(j)];
    }
    for (Eigen::Index j = pinned_zero ? 1 : 0; j < k; ++j) {
      const auto cnt = counts[static_cast<std::size_t>(j)];
      if (cnt > 0) c.row(j) = (sums.row(j) / static_cast<double>(cnt)).cast<float>();
    }
    previous.swap(assign);
  }
  return c;
}

void write_header_line(std::ostream& out, std::string_view key,
                       const std::string& value) {
  out << key << ' ' << value << '\n';
}

int parse_int(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(what);
    return v;
  } catch (const std::exception&) {
    throw FormatError("bad integer for " + what + ": '" + text + "'");
  }
}

}  // namespace

void CodecPreset::validate() const {
  if (name.empty()) throw InvalidArgument("codec preset needs a name");
  if (sample_rate <= 0 || hop <= 0) {
    throw InvalidArgument("preset " + name + ": sample_rate and hop must be > 0");
  }
  if (frame != 2 * hop) throw InvalidArgument("preset " + name + ": frame != 2*hop");
  if (num_quantizers < 1) throw InvalidArgument("preset " + name + ": num_quantizers < 1");
  if (codebook_bits < 1 || codebook_bits > kMaxCodebookBits) {
    throw InvalidArgument("preset " + name + ": codebook_bits outside [1, 14]");
  }
}

double achieved_bps(const CodecPreset& p) {
  return static_cast<double>(p.num_quantizers) * p.codebook_bits *
         p.sample_rate / p.hop;
}

CodecPreset make_preset(std::string name, int sample_rate, int hop,
                        int num_quantizers, double target_bps) {
  CodecPreset p;
  p.name = std::move(name);
  p.sample_rate = sample_rate;
  p.hop = hop;
  p.frame = 2 * hop;
  p.num_quantizers = num_quantizers;
  p.target_bps = target_bps;
  const double frames_per_s = static_cast<double>(sample_rate) / hop;
  const double bits = target_bps / (num_quantizers * frames_per_s);
  p.codebook_bits =
      std::clamp(static_cast<int>(std::lround(bits)), 1, kMaxCodebookBits);
  p.validate();
  return p;
}

int default_hop(int sample_rate) {
  switch (sample_rate) {
    case 16000:
    case 24000:
      return 320;
    case 44100:
    case 48000:
      return 512;
    default:
      return std::max(1, static_cast<int>(std::lround(sample_rate / 50.0)));
  }
}

const std::vector<CodecPreset>& builtin_presets() {
  static const std::vector<CodecPreset> presets = [] {
    struct Row {
      const char* name;
      int sr;
      int nq;
      double bps;
    };
    const Row rows[] = {
        {"F01", 16000, 8, 4000},   {"F02", 16000, 8, 4000},
        {"F03", 16000, 32, 16000}, {"F04", 24000, 8, 6000},
        {"F05", 24000, 8, 6400},   {"F06", 24000, 4, 3000},
        {"F07", 44100, 9, 8000},   {"C3-1", 16000, 12, 3000},
        {"C3-2", 16000, 24, 6000}, {"C3-3", 16000, 32, 12000},
        {"C3-4", 16000, 32, 24000}, {"C4-1", 24000, 4, 3000},
        {"C4-2", 24000, 16, 12000}, {"C4-3", 24000, 32, 24000},
    };
    std::vector<CodecPreset> out;
    for (const auto& r : rows) {
      out.push_back(make_preset(r.name, r.sr, default_hop(r.sr), r.nq, r.bps));
    }
    return out;
  }();
  return presets;
}

const CodecPreset* find_builtin_preset(std::string_view name) {
  for (const auto& p : builtin_presets()) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

CorpusFingerprint fingerprint(const Frames& frames) {
  CorpusFingerprint fp;
  fp.count = static_cast<std::uint64_t>(frames.rows());
  std::uint64_t h = fnv1a64(std::string_view("frames"));
  for (Eigen::Index i = 0; i < frames.rows(); ++i) {
    for (Eigen::Index j = 0; j < frames.cols(); ++j) {
      const float v = static_cast<float>(frames(i, j));
      h = fnv1a64(std::as_bytes(std::span(&v, 1)), h);
    }
  }
  fp.hash = h;
  return fp;
}

std::vector<double> sine_window(int frame) {
  std::vector<double> w(static_cast<std::size_t>(frame));
  for (int n = 0; n < frame; ++n) {
    w[static_cast<std::size_t>(n)] = std::sin(std::numbers::pi * (n + 0.5) / frame);
  }
  return w;
}

Frames analyze(const Waveform& w, const CodecPreset& p) {
  p.validate();
  if (w.sample_rate != p.sample_rate) {
    throw InvalidArgument("analyze: waveform rate " + std::to_string(w.sample_rate) +
                          " != preset " + p.name + " rate " +
                          std::to_string(p.sample_rate));
  }
  const auto len = static_cast<Eigen::Index>(w.size());
  if (len < p.frame) {
    throw InvalidArgument("analyze: signal shorter than one frame (" +
                          std::to_string(len) + " < " + std::to_string(p.frame) + ")");
  }
  const Eigen::Index n_frames = (len - p.frame) / p.hop + 1;
  const auto window = sine_window(p.frame);
  Frames windowed(n_frames, p.frame);
  for (Eigen::Index f = 0; f < n_frames; ++f) {
    const double* src = w.samples.data() + f * p.hop;
    for (int t = 0; t < p.frame; ++t) {
      windowed(f, t) = src[t] * window[static_cast<std::size_t>(t)];
    }
  }
  const auto basis = dct_matrix(p.frame);
  Frames coeffs(n_frames, p.frame);
  coeffs.noalias() = windowed * basis->transpose();
  return coeffs;
}

Waveform synthesize(const Frames& frames, const CodecPreset& p) {
  p.validate();
  if (frames.cols() != p.frame) {
    throw InvalidArgument("synthesize: frame width " + std::to_string(frames.cols()) +
                          " != preset frame " + std::to_string(p.frame));
  }
  const Eigen::Index n_frames = frames.rows();
  Waveform out;
  out.sample_rate = p.sample_rate;
  if (n_frames == 0) return out;
  const auto basis = dct_matrix(p.frame);
  Frames time(n_frames, p.frame);
  time.noalias() = frames * (*basis);
  const auto window = sine_window(p.frame);
  out.samples.assign(static_cast<std::size_t>((n_frames - 1) * p.hop + p.frame), 0.0);
  for (Eigen::Index f = 0; f < n_frames; ++f) {
    double* dst = out.samples.data() + f * p.hop;
    for (int t = 0; t < p.frame; ++t) {
      dst[t] += time(f, t) * window[static_cast<std::size_t>(t)];
    }
  }
  return out;
}

Waveform pad_for_codec(const Waveform& w, const CodecPreset& p) {
  const auto len = static_cast<std::int64_t>(w.size());
  const std::int64_t n_frames = (p.hop + len - 1) / p.hop + 1;
  Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples.assign(static_cast<std::size_t>((n_frames + 1) * p.hop), 0.0);
  std::copy(w.samples.begin(), w.samples.end(), out.samples.begin() + p.hop);
  return out;
}

Frames codec_frames(const Waveform& w, const CodecPreset& p) {
  return analyze(pad_for_codec(resample(w, p.sample_rate), p), p);
}

CodebookSet train_codebooks(const Frames& frames, const CodecPreset& p,
                            std::uint64_t seed,
                            const CodebookTrainingOptions& options) {
  p.validate();
  if (frames.cols() != p.frame) {
    throw InvalidArgument("train_codebooks: frame width mismatch for preset " + p.name);
  }
  const auto k = static_cast<Eigen::Index>(p.codebook_size());
  if (frames.rows() < k) {
    throw InvalidArgument("train_codebooks: preset " + p.name + " needs at least " +
                          std::to_string(k) + " frames, got " +
                          std::to_string(frames.rows()));
  }
  if (options.iterations < 1) throw InvalidArgument("train_codebooks: iterations < 1");

  CodebookSet cb;
  cb.preset = p;
  cb.trained_on = fingerprint(frames);

  Frames residual;
  if (options.max_frames > 0 &&
      static_cast<std::size_t>(frames.rows()) > options.max_frames) {
    if (static_cast<Eigen::Index>(options.max_frames) < k) {
      throw InvalidArgument("train_codebooks: max_frames below codebook size");
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(frames.rows()));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
    Rng pick(derive_seed(seed, "codebook-subsample"));
    pick.shuffle(order);
    order.resize(options.max_frames);
    std::sort(order.begin(), order.end());
    residual.resize(static_cast<Eigen::Index>(order.size()), frames.cols());
    for (std::size_t i = 0; i < order.size(); ++i) {
      residual.row(static_cast<Eigen::Index>(i)) = frames.row(order[i]);
    }
  } else {
    residual = frames;
  }

  cb.residual_energy.push_back(mean_energy(residual));
  std::vector<std::int32_t> chosen;
  for (int s = 0; s < p.num_quantizers; ++s) {
    const bool pinned = s > 0;
    Rng rng(derive_seed(seed, "codebook-stage", static_cast<std::uint64_t>(s)));
    bool ran_out = false;
    Codebook c;
    if (pinned && cb.residual_energy.back() <= 1e-24) {
      c = Codebook::Zero(k, p.frame);  // nothing left to quantize
    } else {
      c = kmeans(residual.cast<float>(), k, options.iterations, rng, pinned, ran_out);
    }
    if (s == 0 && ran_out) cb.status = TrainStatus::kDegenerate;
    quantize_stage(residual, c, pinned, chosen);
    cb.stages.push_back(std::move(c));
    cb.residual_energy.push_back(mean_energy(residual));
  }
  return cb;
}

CodeIndices rvq_encode(const Frames& frames, const CodebookSet& cb) {
  if (frames.cols() != cb.preset.frame) {
    throw InvalidArgument("rvq_encode: frame width " + std::to_string(frames.cols()) +
                          " != codebook width " + std::to_string(cb.preset.frame));
  }
  CodeIndices idx(frames.rows(), cb.num_stages());
  Frames residual = frames;
  std::vector<std::int32_t> chosen;
  for (int s = 0; s < cb.num_stages(); ++s) {
    quantize_stage(residual, cb.stages[static_cast<std::size_t>(s)], s > 0, chosen);
    for (Eigen::Index i = 0; i < frames.rows(); ++i) {
      idx(i, s) = chosen[static_cast<std::size_t>(i)];
    }
  }
  return idx;
}

Frames rvq_decode(const CodeIndices& idx, const CodebookSet& cb, int stages) {
  const int use = stages < 0 ? cb.num_stages() : stages;
  if (use > cb.num_stages() || idx.cols() < use) {
    throw InvalidArgument("rvq_decode: requested more stages than available");
  }
  const auto k = static_cast<std::int32_t>(cb.preset.codebook_size());
  Frames out = Frames::Zero(idx.rows(), cb.preset.frame);
  for (Eigen::Index i = 0; i < idx.rows(); ++i) {
    for (int s = 0; s < use; ++s) {
      const std::int32_t j = idx(i, s);
      if (j < 0 || j >= k) {
        throw InvalidArgument("rvq_decode: index " + std::to_string(j) +
                              " out of range at frame " + std::to_string(i));
      }
      out.row(i) += cb.stages[static_cast<std::size_t>(s)].row(j).cast<double>();
    }
  }
  return out;
}

Waveform transcode(const Waveform& w, const CodebookSet& cb) {
  validate(w);
  const CodecPreset& p = cb.preset;
  const Waveform at_rate = resample(w, p.sample_rate);
  const Frames frames = analyze(pad_for_codec(at_rate, p), p);
  const Waveform decoded = synthesize(rvq_decode(rvq_encode(frames, cb), cb), p);

  Waveform trimmed;
  trimmed.sample_rate = p.sample_rate;
  trimmed.samples.assign(decoded.samples.begin() + p.hop,
                         decoded.samples.begin() + p.hop +
                             static_cast<std::ptrdiff_t>(at_rate.size()));
  Waveform out = resample(trimmed, w.sample_rate);
  out.samples.resize(w.size(), 0.0);
  return out;
}

void save_codebooks(const std::filesystem::path& path, const CodebookSet& cb) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  const auto& p = cb.preset;
  out << kCodebookMagic << ' ' << kCodebookVersion << '\n';
  write_header_line(out, "name", p.name);
  write_header_line(out, "sample_rate", std::to_string(p.sample_rate));
  write_header_line(out, "hop", std::to_string(p.hop));
  write_header_line(out, "frame", std::to_string(p.frame));
  write_header_line(out, "num_quantizers", std::to_string(p.num_quantizers));
  write_header_line(out, "codebook_bits", std::to_string(p.codebook_bits));
  write_header_line(out, "target_bps", format_double(p.target_bps));
  write_header_line(out, "corpus_frames", std::to_string(cb.trained_on.count));
  write_header_line(out, "corpus_hash", hex64(cb.trained_on.hash));
  std::string energies;
  for (double e : cb.residual_energy) {
    if (!energies.empty()) energies += ' ';
    energies += format_double(e);
  }
  write_header_line(out, "residual_energy", energies);
  write_header_line(out, "status",
                    cb.status == TrainStatus::kOk ? "ok" : "degenerate");
  out << "end\n";
  for (const auto& stage : cb.stages) {
    write_f32_le(out, std::span<const float>(stage.data(),
                                             static_cast<std::size_t>(stage.size())));
  }
  if (!out) throw IoError(path.string() + ": write failed");
}

CodebookSet load_codebooks(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open file");
  const std::string src = path.string();
  std::string magic_line;
  std::getline(in, magic_line);
  std::istringstream magic(magic_line);
  std::string tag;
  int version = -1;
  magic >> tag >> version;
  if (tag != kCodebookMagic) throw FormatError(src + ": not a codebook file");
  if (version != kCodebookVersion) {
    throw VersionError(src + ": codebook version " + std::to_string(version) +
                       ", expected " + std::to_string(kCodebookVersion));
  }
  const auto header = read_text_header(in, src);
  CodebookSet cb;
  auto& p = cb.preset;
  p.name = header_value(header, "name", src);
  p.sample_rate = parse_int(header_value(header, "sample_rate", src), "sample_rate");
  p.hop = parse_int(header_value(header, "hop", src), "hop");
  p.frame = parse_int(header_value(header, "frame", src), "frame");
  p.num_quantizers = parse_int(header_value(header, "num_quantizers", src), "num_quantizers");
  p.codebook_bits = parse_int(header_value(header, "codebook_bits", src), "codebook_bits");
  p.target_bps = std::stod(header_value(header, "target_bps", src));
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(src + ": " + e.what());
  }
  cb.trained_on.count = std::stoull(header_value(header, "corpus_frames", src));
  cb.trained_on.hash = std::stoull(header_value(header, "corpus_hash", src), nullptr, 16);
  std::istringstream energies(header_value(header, "residual_energy", src));
  for (double e; energies >> e;) cb.residual_energy.push_back(e);
  cb.status = header_value(header, "status", src) == "ok" ? TrainStatus::kOk
                                                          : TrainStatus::kDegenerate;
  const auto k = static_cast<Eigen::Index>(p.codebook_size());
  for (int s = 0; s < p.num_quantizers; ++s) {
    Codebook stage(k, p.frame);
    read_f32_le(in, std::span<float>(stage.data(), static_cast<std::size_t>(stage.size())));
    if (!stage.allFinite()) throw FormatError(src + ": non-finite centroid");
    cb.stages.push_back(std::move(stage));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError(src + ": trailing bytes after centroid blocks");
  }
  return cb;
}

}  // namespace codecwb
