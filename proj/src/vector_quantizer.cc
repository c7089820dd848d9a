// Copyright 2026 The sfoa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sfoa/vector_quantizer.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "sfoa/error.h"
#include "sfoa/wav_io.h"

namespace sfoa {

namespace {

constexpr std::uint32_t kFormatVersion = 1;

// Uniform in [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementations.
double UniformUnit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t UniformIndex(std::mt19937_64& rng, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(UniformUnit(rng) * n));
}

double SquaredDistance(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    acc += d * d;
  }
  return acc;
}

std::uint32_t Nearest(const Codebook& cb, std::span<const float> x,
                      double* distance) {
  std::uint32_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < cb.size(); ++n) {
    const double d = SquaredDistance(x, cb.entry(n));
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::uint32_t>(n);
    }
  }
  if (distance) *distance = best_d;
  return best;
}

void CheckDims(const Codebook& cb, const LatentBatch& latents) {
  if (cb.dim() != latents.dim()) {
    throw Error(ErrorCode::kShapeMismatch,
                "latent dimension " + std::to_string(latents.dim()) +
                    " does not match codebook dimension " +
                    std::to_string(cb.dim()));
  }
}

class Writer {
 public:
  void Tag(const char* tag) { bytes_.insert(bytes_.end(), tag, tag + 4); }
  void U32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void U64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void F32(float v) { U32(std::bit_cast<std::uint32_t>(v)); }
  void F64(double v) { U64(std::bit_cast<std::uint64_t>(v)); }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  Reader(std::vector<std::uint8_t> bytes, std::string name)
      : bytes_(std::move(bytes)), name_(std::move(name)) {}

  void ExpectTag(const char* tag) {
    Need(4);
    if (std::memcmp(bytes_.data() + pos_, tag, 4) != 0) {
      throw Error(ErrorCode::kFormat, name_ + ": bad magic, expected " + tag);
    }
    pos_ += 4;
  }
  std::uint32_t U32() {
    Need(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | bytes_[pos_ + i];
    pos_ += 4;
    return v;
  }
  std::uint64_t U64() {
    Need(8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | bytes_[pos_ + i];
    pos_ += 8;
    return v;
  }
  float F32() { return std::bit_cast<float>(U32()); }
  double F64() { return std::bit_cast<double>(U64()); }
  void ExpectEnd() const {
    if (pos_ != bytes_.size()) {
      throw Error(ErrorCode::kFormat, name_ + ": trailing bytes");
    }
  }
  void Need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw Error(ErrorCode::kFormat, name_ + ": file is truncated");
    }
  }

 private:
  std::vector<std::uint8_t> bytes_;
  std::string name_;
  std::size_t pos_ = 0;
};

void CheckVersion(std::uint32_t version, const std::string& name) {
  if (version != kFormatVersion) {
    throw Error(ErrorCode::kFormat,
                name + ": unsupported version " + std::to_string(version));
  }
}

}  // namespace

LatentBatch::LatentBatch(std::size_t rows, std::size_t dim,
                         double frames_per_second)
    : rows_(rows),
      dim_(dim),
      frames_per_second_(frames_per_second),
      data_(rows * dim, 0.0f) {}

LatentBatch::LatentBatch(std::size_t rows, std::size_t dim,
                         std::vector<float> data, double frames_per_second)
    : rows_(rows),
      dim_(dim),
      frames_per_second_(frames_per_second),
      data_(std::move(data)) {
  if (data_.size() != rows * dim) {
    throw Error(ErrorCode::kShapeMismatch,
                "latent data has " + std::to_string(data_.size()) +
                    " values, expected " + std::to_string(rows * dim));
  }
  for (float v : data_) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kNonFinite, "latent batch has a non-finite value");
    }
  }
}

Codebook::Codebook(std::size_t size, std::size_t dim)
    : entries(size * dim, 0.0f),
      ema_cluster_size(size, 0.0),
      ema_sum(size * dim, 0.0),
      usage(size, 0),
      staleness(size, 0),
      size_(size),
      dim_(dim) {
  if (size == 0 || dim == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "codebook size and dimension must be positive");
  }
}

void Codebook::Validate() const {
  if (size_ == 0 || dim_ == 0 || entries.size() != size_ * dim_ ||
      ema_sum.size() != size_ * dim_ || ema_cluster_size.size() != size_ ||
      usage.size() != size_ || staleness.size() != size_) {
    throw Error(ErrorCode::kShapeMismatch, "codebook arrays are inconsistent");
  }
  if (!(decay > 0.0 && decay < 1.0) || !(smoothing > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "EMA decay must be in (0, 1) and smoothing > 0");
  }
  for (float v : entries) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kNonFinite, "codebook has a non-finite entry");
    }
  }
  for (double v : ema_cluster_size) {
    if (!(v >= 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "negative EMA cluster size");
    }
  }
}

Codebook KMeansInit(const LatentBatch& latents, std::size_t size,
                    int iterations, std::uint64_t seed) {
  if (iterations < 1) {
    throw Error(ErrorCode::kInvalidArgument, "k-means needs at least one iteration");
  }
  if (latents.rows() < size) {
    throw Error(ErrorCode::kInsufficientData,
                "k-means needs at least " + std::to_string(size) +
                    " latent vectors, got " + std::to_string(latents.rows()) +
                    "; supply more data");
  }
  Codebook cb(size, latents.dim());
  const std::size_t rows = latents.rows();
  const std::size_t dim = latents.dim();
  std::mt19937_64 rng(seed);

  // k-means++ seeding.
  std::vector<double> nearest(rows, std::numeric_limits<double>::infinity());
  std::size_t pick = UniformIndex(rng, rows);
  for (std::size_t n = 0; n < size; ++n) {
    const auto src = latents.row(pick);
    std::copy(src.begin(), src.end(), cb.entry(n).begin());
    double total = 0.0;
    for (std::size_t b = 0; b < rows; ++b) {
      nearest[b] = std::min(nearest[b], SquaredDistance(latents.row(b), cb.entry(n)));
      total += nearest[b];
    }
    if (n + 1 == size) break;
    if (total > 0.0) {
      const double target = UniformUnit(rng) * total;
      double acc = 0.0;
      pick = rows - 1;
      for (std::size_t b = 0; b < rows; ++b) {
        acc += nearest[b];
        if (acc > target && nearest[b] > 0.0) {
          pick = b;
          break;
        }
      }
    } else {
      pick = UniformIndex(rng, rows);
    }
  }

  // Lloyd iterations.
  std::vector<std::uint32_t> assign(rows, std::numeric_limits<std::uint32_t>::max());
  std::vector<double> sums(size * dim);
  std::vector<double> counts(size);
  for (int it = 0; it < iterations; ++it) {
    bool changed = false;
    for (std::size_t b = 0; b < rows; ++b) {
      const std::uint32_t idx = Nearest(cb, latents.row(b), nullptr);
      changed |= idx != assign[b];
      assign[b] = idx;
    }
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0.0);
    for (std::size_t b = 0; b < rows; ++b) {
      counts[assign[b]] += 1.0;
      const auto x = latents.row(b);
      for (std::size_t d = 0; d < dim; ++d) sums[assign[b] * dim + d] += x[d];
    }
    for (std::size_t n = 0; n < size; ++n) {
      if (counts[n] == 0.0) continue;  // empty cluster keeps its center
      for (std::size_t d = 0; d < dim; ++d) {
        cb.entry(n)[d] = static_cast<float>(sums[n * dim + d] / counts[n]);
      }
    }
    if (!changed && it > 0) break;
  }

  // EMA state from the final assignment.
  std::fill(sums.begin(), sums.end(), 0.0);
  std::fill(counts.begin(), counts.end(), 0.0);
  for (std::size_t b = 0; b < rows; ++b) {
    const std::uint32_t idx = Nearest(cb, latents.row(b), nullptr);
    counts[idx] += 1.0;
    const auto x = latents.row(b);
    for (std::size_t d = 0; d < dim; ++d) sums[idx * dim + d] += x[d];
  }
  cb.ema_cluster_size = counts;
  cb.ema_sum = sums;
  for (std::size_t n = 0; n < size; ++n) {
    cb.usage[n] = static_cast<std::uint32_t>(counts[n]);
  }
  return cb;
}

Quantized Quantize(const Codebook& codebook, const LatentBatch& latents) {
  CheckDims(codebook, latents);
  Quantized out;
  out.indices.resize(latents.rows());
  out.quantized = LatentBatch(latents.rows(), latents.dim(),
                              latents.frames_per_second());
  double total = 0.0;
  for (std::size_t b = 0; b < latents.rows(); ++b) {
    double d = 0.0;
    const std::uint32_t idx = Nearest(codebook, latents.row(b), &d);
    out.indices[b] = idx;
    const auto e = codebook.entry(idx);
    std::copy(e.begin(), e.end(), out.quantized.row(b).begin());
    total += d;
  }
  out.commitment_loss =
      latents.rows() ? total / static_cast<double>(latents.rows()) : 0.0;
  return out;
}

LatentBatch Dequantize(const Codebook& codebook,
                       std::span<const std::uint32_t> indices) {
  LatentBatch out(indices.size(), codebook.dim());
  for (std::size_t b = 0; b < indices.size(); ++b) {
    if (indices[b] >= codebook.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "token " + std::to_string(indices[b]) +
                      " out of range for a codebook of " +
                      std::to_string(codebook.size()));
    }
    const auto e = codebook.entry(indices[b]);
    std::copy(e.begin(), e.end(), out.row(b).begin());
  }
  return out;
}

void EmaUpdate(Codebook& codebook, const LatentBatch& latents,
               std::span<const std::uint32_t> indices) {
  CheckDims(codebook, latents);
  if (indices.size() != latents.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "one index per latent row required");
  }
  const std::size_t size = codebook.size();
  const std::size_t dim = codebook.dim();
  std::vector<double> counts(size, 0.0);
  std::vector<double> sums(size * dim, 0.0);
  for (std::size_t b = 0; b < indices.size(); ++b) {
    const std::uint32_t n = indices[b];
    if (n >= size) {
      throw Error(ErrorCode::kInvalidArgument, "assignment index out of range");
    }
    counts[n] += 1.0;
    const auto x = latents.row(b);
    for (std::size_t d = 0; d < dim; ++d) sums[n * dim + d] += x[d];
  }

  const double g = codebook.decay;
  double total = 0.0;
  for (std::size_t n = 0; n < size; ++n) {
    codebook.ema_cluster_size[n] = g * codebook.ema_cluster_size[n] + (1.0 - g) * counts[n];
    total += codebook.ema_cluster_size[n];
    for (std::size_t d = 0; d < dim; ++d) {
      double& s = codebook.ema_sum[n * dim + d];
      s = g * s + (1.0 - g) * sums[n * dim + d];
    }
  }
  // Laplace smoothing keeps the divisor away from zero.
  const double eta = codebook.smoothing;
  const double denom = total + static_cast<double>(size) * eta;
  for (std::size_t n = 0; n < size; ++n) {
    if (counts[n] > 0.0) {
      const double smoothed = (codebook.ema_cluster_size[n] + eta) / denom * total;
      for (std::size_t d = 0; d < dim; ++d) {
        codebook.entry(n)[d] =
            static_cast<float>(codebook.ema_sum[n * dim + d] / smoothed);
      }
      codebook.usage[n] += static_cast<std::uint32_t>(counts[n]);
      codebook.staleness[n] = 0;
    } else {
      ++codebook.staleness[n];
    }
  }
}

std::size_t ReactivateDeadCodes(Codebook& codebook, const LatentBatch& latents,
                                int staleness_threshold, std::mt19937_64& rng) {
  CheckDims(codebook, latents);
  if (latents.rows() == 0) {
    throw Error(ErrorCode::kEmptyInput, "reactivation needs a non-empty batch");
  }
  const auto threshold = static_cast<std::uint32_t>(std::max(staleness_threshold, 0));
  std::size_t replaced = 0;
  for (std::size_t n = 0; n < codebook.size(); ++n) {
    if (codebook.staleness[n] < threshold) continue;
    const auto src = latents.row(UniformIndex(rng, latents.rows()));
    std::copy(src.begin(), src.end(), codebook.entry(n).begin());
    codebook.ema_cluster_size[n] = 1.0;
    for (std::size_t d = 0; d < codebook.dim(); ++d) {
      codebook.ema_sum[n * codebook.dim() + d] = src[d];
    }
    codebook.usage[n] = 0;
    codebook.staleness[n] = 0;
    ++replaced;
  }
  return replaced;
}

CodebookStats ComputeCodebookStats(std::size_t codebook_size,
                                   std::span<const std::uint32_t> indices) {
  CodebookStats stats;
  if (indices.empty() || codebook_size == 0) return stats;
  std::vector<std::size_t> counts(codebook_size, 0);
  for (std::uint32_t i : indices) {
    if (i >= codebook_size) {
      throw Error(ErrorCode::kInvalidArgument, "index out of codebook range");
    }
    ++counts[i];
  }
  double entropy = 0.0;
  std::size_t used = 0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    ++used;
    const double p = static_cast<double>(c) / static_cast<double>(indices.size());
    entropy -= p * std::log(p);
  }
  stats.perplexity = std::exp(entropy);
  stats.usage_fraction = static_cast<double>(used) / static_cast<double>(codebook_size);
  return stats;
}

LatentBatch MakeClusteredLatents(std::size_t clusters, std::size_t per_cluster,
                                 std::size_t dim, double separation,
                                 double spread, std::uint64_t seed,
                                 std::vector<std::vector<double>>* centers) {
  if (clusters == 0 || clusters > dim) {
    throw Error(ErrorCode::kInvalidArgument,
                "need 1 <= clusters <= dimension for axis-aligned centers");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, spread);
  // Centers on distinct axes at radius separation / sqrt(2) are pairwise
  // `separation` apart.
  const double radius = separation / std::sqrt(2.0);
  std::vector<std::vector<double>> c(clusters, std::vector<double>(dim, 0.0));
  for (std::size_t k = 0; k < clusters; ++k) c[k][k] = radius;
  std::vector<float> data;
  data.reserve(clusters * per_cluster * dim);
  for (std::size_t i = 0; i < per_cluster; ++i) {
    for (std::size_t k = 0; k < clusters; ++k) {
      for (std::size_t d = 0; d < dim; ++d) {
        data.push_back(static_cast<float>(c[k][d] + noise(rng)));
      }
    }
  }
  if (centers) *centers = c;
  return LatentBatch(clusters * per_cluster, dim, std::move(data));
}

void WriteCodebook(const std::filesystem::path& path, const Codebook& codebook) {
  codebook.Validate();
  Writer w;
  w.Tag("SFCB");
  w.U32(kFormatVersion);
  w.U32(static_cast<std::uint32_t>(codebook.size()));
  w.U32(static_cast<std::uint32_t>(codebook.dim()));
  for (float v : codebook.entries) w.F32(v);
  w.F64(codebook.decay);
  w.F64(codebook.smoothing);
  for (double v : codebook.ema_cluster_size) w.F64(v);
  for (double v : codebook.ema_sum) w.F64(v);
  for (std::uint32_t v : codebook.usage) w.U32(v);
  for (std::uint32_t v : codebook.staleness) w.U32(v);
  WriteFileAtomically(path, w.bytes());
}

Codebook ReadCodebook(const std::filesystem::path& path) {
  Reader r(ReadFileBytes(path), path.string());
  r.ExpectTag("SFCB");
  CheckVersion(r.U32(), path.string());
  const std::size_t size = r.U32();
  const std::size_t dim = r.U32();
  if (size == 0 || dim == 0) {
    throw Error(ErrorCode::kFormat, path.string() + ": empty codebook");
  }
  r.Need(size * dim * 4);
  Codebook cb(size, dim);
  for (float& v : cb.entries) v = r.F32();
  cb.decay = r.F64();
  cb.smoothing = r.F64();
  for (double& v : cb.ema_cluster_size) v = r.F64();
  for (double& v : cb.ema_sum) v = r.F64();
  for (std::uint32_t& v : cb.usage) v = r.U32();
  for (std::uint32_t& v : cb.staleness) v = r.U32();
  r.ExpectEnd();
  cb.Validate();
  return cb;
}

void WriteLatents(const std::filesystem::path& path, const LatentBatch& latents) {
  Writer w;
  w.Tag("SFLT");
  w.U32(kFormatVersion);
  w.U32(static_cast<std::uint32_t>(latents.rows()));
  w.U32(static_cast<std::uint32_t>(latents.dim()));
  w.F32(static_cast<float>(latents.frames_per_second()));
  for (float v : latents.data()) w.F32(v);
  WriteFileAtomically(path, w.bytes());
}

LatentBatch ReadLatents(const std::filesystem::path& path) {
  Reader r(ReadFileBytes(path), path.string());
  r.ExpectTag("SFLT");
  CheckVersion(r.U32(), path.string());
  const std::size_t rows = r.U32();
  const std::size_t dim = r.U32();
  const double fps = r.F32();
  r.Need(rows * dim * 4);
  std::vector<float> data(rows * dim);
  for (float& v : data) v = r.F32();
  r.ExpectEnd();
  return LatentBatch(rows, dim, std::move(data), fps);
}

void WriteTokens(const std::filesystem::path& path,
                 std::span<const std::uint32_t> indices) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(indices.size() * 2);
  for (std::uint32_t i : indices) {
    if (i >= kMaxTokenCodebookSize) {
      throw Error(ErrorCode::kInvalidArgument,
                  "token " + std::to_string(i) + " does not fit in 16 bits");
    }
    bytes.push_back(static_cast<std::uint8_t>(i));
    bytes.push_back(static_cast<std::uint8_t>(i >> 8));
  }
  WriteFileAtomically(path, bytes);
}

std::vector<std::uint32_t> ReadTokens(const std::filesystem::path& path) {
  const auto bytes = ReadFileBytes(path);
  if (bytes.size() % 2) {
    throw Error(ErrorCode::kFormat, path.string() + ": odd token stream length");
  }
  std::vector<std::uint32_t> out(bytes.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint32_t>(bytes[2 * i]) |
             (static_cast<std::uint32_t>(bytes[2 * i + 1]) << 8);
  }
  return out;
}

}  // namespace sfoa
