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

#ifndef SFOA_VECTOR_QUANTIZER_H_
#define SFOA_VECTOR_QUANTIZER_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <vector>

namespace sfoa {

// Production operating point of the codec bottleneck.
inline constexpr std::size_t kProductionCodebookSize = 4096;
inline constexpr std::size_t kProductionLatentDim = 512;
inline constexpr double kTokensPerSecond = 75.0;
inline constexpr std::size_t kMaxTokenCodebookSize = 65536;

// B latent vectors of dimension `dim`, row-major.
class LatentBatch {
 public:
  LatentBatch() = default;
  LatentBatch(std::size_t rows, std::size_t dim,
              double frames_per_second = kTokensPerSecond);
  // Throws kShapeMismatch if data.size() != rows * dim, kNonFinite on NaN/Inf.
  LatentBatch(std::size_t rows, std::size_t dim, std::vector<float> data,
              double frames_per_second = kTokensPerSecond);

  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }
  double frames_per_second() const { return frames_per_second_; }
  std::span<const float> row(std::size_t b) const {
    return {data_.data() + b * dim_, dim_};
  }
  std::span<float> row(std::size_t b) { return {data_.data() + b * dim_, dim_}; }
  const std::vector<float>& data() const { return data_; }

  friend bool operator==(const LatentBatch&, const LatentBatch&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  double frames_per_second_ = kTokensPerSecond;
  std::vector<float> data_;
};

// Codebook plus the exponential-moving-average state used to update it.
struct Codebook {
  Codebook() = default;
  Codebook(std::size_t size, std::size_t dim);

  std::size_t size() const { return size_; }
  std::size_t dim() const { return dim_; }
  std::span<const float> entry(std::size_t n) const {
    return {entries.data() + n * dim_, dim_};
  }
  std::span<float> entry(std::size_t n) { return {entries.data() + n * dim_, dim_}; }

  // Throws on non-finite entries, negative cluster sizes, or bad shapes.
  void Validate() const;

  std::vector<float> entries;              // size x dim
  std::vector<double> ema_cluster_size;    // size
  std::vector<double> ema_sum;             // size x dim
  std::vector<std::uint32_t> usage;        // vectors assigned since reactivation
  std::vector<std::uint32_t> staleness;    // consecutive batches unused
  double decay = 0.99;
  double smoothing = 1e-5;

 private:
  std::size_t size_ = 0;
  std::size_t dim_ = 0;
};

// K-means++ seeding followed by up to `iterations` Lloyd steps. The EMA state
// is initialized from the final assignment. Throws kInsufficientData when
// the batch has fewer rows than `size`.
Codebook KMeansInit(const LatentBatch& latents, std::size_t size,
                    int iterations, std::uint64_t seed);

struct Quantized {
  std::vector<std::uint32_t> indices;
  LatentBatch quantized;
  double commitment_loss = 0.0;  // mean squared distance to the chosen entry
};

// Nearest entry per row, ties going to the lowest index.
Quantized Quantize(const Codebook& codebook, const LatentBatch& latents);

// Table lookup of entries for a token stream.
LatentBatch Dequantize(const Codebook& codebook,
                       std::span<const std::uint32_t> indices);

void EmaUpdate(Codebook& codebook, const LatentBatch& latents,
               std::span<const std::uint32_t> indices);

// Replaces every code unused for at least `staleness_threshold` batches with
// a uniformly drawn row of `latents`. Returns the number replaced.
std::size_t ReactivateDeadCodes(Codebook& codebook, const LatentBatch& latents,
                                int staleness_threshold, std::mt19937_64& rng);

inline constexpr int kDefaultStalenessThreshold = 2;

struct CodebookStats {
  double perplexity = 0.0;
  double usage_fraction = 0.0;
};

CodebookStats ComputeCodebookStats(std::size_t codebook_size,
                                   std::span<const std::uint32_t> indices);

// `clusters` isotropic Gaussian blobs whose centers lie on scaled coordinate
// axes, `per_cluster` rows each, interleaved. Centers are returned through
// `centers` when non-null.
LatentBatch MakeClusteredLatents(std::size_t clusters, std::size_t per_cluster,
                                 std::size_t dim, double separation,
                                 double spread, std::uint64_t seed,
                                 std::vector<std::vector<double>>* centers = nullptr);

// Binary formats, little endian:
//   codebook: "SFCB" u32 version u32 N u32 D, N*D f32 entries, f64 decay,
//             f64 smoothing, N f64 cluster sizes, N*D f64 sums,
//             N u32 usage, N u32 staleness
//   latents:  "SFLT" u32 version u32 B u32 D, f32 frames/second, B*D f32
//   tokens:   raw u16 per index
void WriteCodebook(const std::filesystem::path& path, const Codebook& codebook);
Codebook ReadCodebook(const std::filesystem::path& path);
void WriteLatents(const std::filesystem::path& path, const LatentBatch& latents);
LatentBatch ReadLatents(const std::filesystem::path& path);
void WriteTokens(const std::filesystem::path& path,
                 std::span<const std::uint32_t> indices);
std::vector<std::uint32_t> ReadTokens(const std::filesystem::path& path);

}  // namespace sfoa

#endif  // SFOA_VECTOR_QUANTIZER_H_
