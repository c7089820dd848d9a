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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "sfoa/error.h"
#include "sfoa/vector_quantizer.h"
#include "test_util.h"

namespace sfoa {
namespace {

LatentBatch Rows(std::size_t dim, std::vector<float> data) {
  const std::size_t rows = data.size() / dim;
  return LatentBatch(rows, dim, std::move(data));
}

Codebook Entries(std::size_t dim, const std::vector<float>& data) {
  Codebook cb(data.size() / dim, dim);
  cb.entries = data;
  return cb;
}

LatentBatch GaussianRows(std::size_t rows, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> normal;
  std::vector<float> data(rows * dim);
  for (float& v : data) v = normal(rng);
  return LatentBatch(rows, dim, std::move(data));
}

// Oracle: exhaustive search, first minimum wins.
std::uint32_t BruteForceNearest(const Codebook& cb, std::span<const float> x) {
  std::uint32_t best = 0;
  double best_d = 0.0;
  for (std::size_t n = 0; n < cb.size(); ++n) {
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double diff = double{x[i]} - double{cb.entry(n)[i]};
      d += diff * diff;
    }
    if (n == 0 || d < best_d) {
      best_d = d;
      best = static_cast<std::uint32_t>(n);
    }
  }
  return best;
}

double MaxCenterError(const Codebook& cb, const std::vector<std::vector<double>>& centers) {
  double worst = 0.0;
  for (const auto& c : centers) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < cb.size(); ++n) {
      double d = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i) {
        d += (cb.entry(n)[i] - c[i]) * (cb.entry(n)[i] - c[i]);
      }
      best = std::min(best, std::sqrt(d));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

TEST_CASE("k-means with one entry is the mean") {
  const LatentBatch x = Rows(2, {1, 2, 3, 4, 5, 9});
  const Codebook cb = KMeansInit(x, 1, 5, 0);
  CHECK(cb.entry(0)[0] == doctest::Approx(3.0));
  CHECK(cb.entry(0)[1] == doctest::Approx(5.0));
  CHECK(cb.ema_cluster_size[0] == 3.0);

  const LatentBatch same = Rows(3, {0.25f, -1.5f, 7, 0.25f, -1.5f, 7});
  const Codebook one = KMeansInit(same, 1, 3, 9);
  CHECK(one.entry(0)[0] == 0.25f);
  CHECK(one.entry(0)[1] == -1.5f);
  CHECK(one.entry(0)[2] == 7.0f);
}

TEST_CASE("k-means recovers separated clusters and is deterministic") {
  std::vector<std::vector<double>> centers;
  const LatentBatch x = MakeClusteredLatents(4, 100, 8, 10.0, 0.01, 3, &centers);
  const Codebook cb = KMeansInit(x, 4, 20, 42);
  CHECK(MaxCenterError(cb, centers) < 0.05);
  // Every true center owns a different code.
  std::vector<std::uint32_t> owner;
  for (const auto& c : centers) {
    std::vector<float> f(c.begin(), c.end());
    owner.push_back(BruteForceNearest(cb, f));
  }
  std::sort(owner.begin(), owner.end());
  CHECK(std::unique(owner.begin(), owner.end()) == owner.end());

  const Codebook again = KMeansInit(x, 4, 20, 42);
  CHECK(again.entries == cb.entries);
  CHECK(again.ema_sum == cb.ema_sum);
}

TEST_CASE("k-means rejects too little data") {
  const LatentBatch x = GaussianRows(3, 4, 1);
  try {
    KMeansInit(x, 4, 5, 0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInsufficientData);
  }
  CHECK_THROWS_AS(KMeansInit(x, 2, 0, 0), Error);
}

TEST_CASE("quantize examples") {
  std::vector<float> entries;
  for (int n = 0; n < 10; ++n) {
    entries.push_back(static_cast<float>(n));
    entries.push_back(0.0f);
  }
  const Codebook cb = Entries(2, entries);
  Quantized q = Quantize(cb, Rows(2, {7, 0}));
  CHECK(q.indices[0] == 7);
  CHECK(q.commitment_loss == 0.0);

  // Equidistant from entries 2 and 5 (distance 1.5 each along the axis).
  std::vector<float> sparse(12, 0.0f);
  sparse[2 * 2] = 2.0f;
  sparse[5 * 2] = 5.0f;
  for (int n : {0, 1, 3, 4}) sparse[n * 2 + 1] = 100.0f;
  q = Quantize(Entries(2, sparse), Rows(2, {3.5f, 0}));
  CHECK(q.indices[0] == 2);

  q = Quantize(Entries(2, {0, 0, 10, 10}), Rows(2, {0, 3}));
  CHECK(q.indices[0] == 0);
  CHECK(q.commitment_loss == 9.0);
  CHECK(q.quantized.row(0)[1] == 0.0f);

  CHECK_THROWS_AS(Quantize(cb, Rows(3, {1, 2, 3})), Error);
}

TEST_CASE("quantize matches a brute-force nearest-neighbour oracle") {
  // Small integer grids make exact ties common.
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> small(-2, 2);
  std::vector<float> entries(64 * 3), rows(1000 * 3);
  for (float& v : entries) v = static_cast<float>(small(rng));
  for (float& v : rows) v = static_cast<float>(small(rng));
  const Codebook cb = Entries(3, entries);
  const LatentBatch x = Rows(3, rows);
  const Quantized q = Quantize(cb, x);
  double commitment = 0.0;
  for (std::size_t b = 0; b < x.rows(); ++b) {
    const std::uint32_t want = BruteForceNearest(cb, x.row(b));
    CHECK(q.indices[b] == want);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(q.quantized.row(b)[i] == cb.entry(want)[i]);
      const double d = double{x.row(b)[i]} - double{cb.entry(want)[i]};
      commitment += d * d;
    }
  }
  CHECK(q.commitment_loss == doctest::Approx(commitment / 1000.0).epsilon(1e-12));

  const Codebook random = KMeansInit(GaussianRows(300, 6, 1), 32, 3, 2);
  const LatentBatch y = GaussianRows(1000, 6, 8);
  const Quantized qy = Quantize(random, y);
  for (std::size_t b = 0; b < y.rows(); ++b) {
    CHECK(qy.indices[b] == BruteForceNearest(random, y.row(b)));
  }
  CHECK(Quantize(random, y).indices == qy.indices);
}

TEST_CASE("quantize is permutation equivariant") {
  const Codebook cb = KMeansInit(GaussianRows(200, 4, 1), 16, 5, 3);
  const LatentBatch x = GaussianRows(50, 4, 2);
  std::vector<std::size_t> perm(50);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(4));
  std::vector<float> shuffled;
  for (std::size_t p : perm) shuffled.insert(shuffled.end(), x.row(p).begin(), x.row(p).end());
  const Quantized a = Quantize(cb, x);
  const Quantized b = Quantize(cb, Rows(4, shuffled));
  for (std::size_t i = 0; i < 50; ++i) CHECK(b.indices[i] == a.indices[perm[i]]);
}

TEST_CASE("dequantize looks entries up") {
  const Codebook cb = Entries(2, {1, 2, 3, 4, 5, 6});
  const std::vector<std::uint32_t> idx = {2, 0, 2};
  const LatentBatch d = Dequantize(cb, idx);
  CHECK(d.rows() == 3);
  CHECK(d.row(0)[0] == 5.0f);
  CHECK(d.row(1)[1] == 2.0f);
  const std::vector<std::uint32_t> bad = {3};
  CHECK_THROWS_AS(Dequantize(cb, bad), Error);
}

TEST_CASE("EMA with a single code follows the closed form") {
  Codebook cb = Entries(2, {0, 0});
  cb.ema_cluster_size = {4.0};
  cb.ema_sum = {0.0, 0.0};
  const LatentBatch x = Rows(2, {3, -1, 3, -1, 3, -1, 3, -1});
  const std::vector<std::uint32_t> idx(4, 0);
  for (int t = 1; t <= 300; ++t) {
    EmaUpdate(cb, x, idx);
    const double gt = std::pow(0.99, t);
    const double size = gt * 4.0 + (1 - gt) * 4.0;
    const double sum0 = (1 - gt) * 4.0 * 3.0;
    CHECK(cb.ema_cluster_size[0] == doctest::Approx(size).epsilon(1e-12));
    CHECK(cb.entry(0)[0] == doctest::Approx(sum0 / size).epsilon(1e-6));
    CHECK(cb.entry(0)[1] == doctest::Approx(-sum0 / size / 3.0).epsilon(1e-6));
  }
  // Geometric approach to v at rate (1 - gamma).
  CHECK(std::abs(cb.entry(0)[0] - 3.0) == doctest::Approx(3.0 * std::pow(0.99, 300)).epsilon(1e-4));
}

TEST_CASE("EMA converges to the cluster means of a stationary stream") {
  std::vector<std::vector<double>> centers;
  Codebook cb = KMeansInit(MakeClusteredLatents(2, 50, 4, 4.0, 0.3, 1, &centers), 2, 10, 7);
  // Shift the codes so the EMA has somewhere to go.
  for (float& v : cb.entries) v += 0.5f;
  double mean_error = 0.0;
  std::vector<std::vector<double>> running(2, std::vector<double>(4, 0.0));
  for (int step = 0; step < 500; ++step) {
    const LatentBatch x = MakeClusteredLatents(2, 50, 4, 4.0, 0.3, 100 + step);
    EmaUpdate(cb, x, Quantize(cb, x).indices);
  }
  mean_error = MaxCenterError(cb, centers);
  CHECK(mean_error < 1e-2);
}

TEST_CASE("EMA leaves unassigned codes alone and counts staleness") {
  Codebook cb = KMeansInit(MakeClusteredLatents(3, 20, 3, 5.0, 0.1, 1), 3, 5, 1);
  const std::vector<float> before(cb.entry(2).begin(), cb.entry(2).end());
  const LatentBatch x = Rows(3, {0.1f, 0, 0, 0, 0.2f, 0});
  const std::vector<std::uint32_t> idx = {0, 1};
  const auto usage0 = cb.usage[0];
  EmaUpdate(cb, x, idx);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(cb.entry(2)[i] - before[i]) <= 1e-12);
  CHECK(cb.staleness[2] == 1);
  CHECK(cb.staleness[0] == 0);
  CHECK(cb.usage[0] == usage0 + 1);
  EmaUpdate(cb, x, idx);
  CHECK(cb.staleness[2] == 2);
  const std::vector<std::uint32_t> wrong = {0};
  CHECK_THROWS_AS(EmaUpdate(cb, x, wrong), Error);
  cb.Validate();
}

TEST_CASE("dead-code reactivation") {
  Codebook cb = KMeansInit(MakeClusteredLatents(4, 10, 4, 5.0, 0.1, 1), 4, 5, 1);
  const LatentBatch batch = MakeClusteredLatents(4, 10, 4, 5.0, 0.1, 2);
  std::mt19937_64 rng(3);
  const Codebook fresh = cb;
  CHECK(ReactivateDeadCodes(cb, batch, 2, rng) == 0);
  CHECK(cb.entries == fresh.entries);

  cb.staleness = {0, 2, 0, 5};
  CHECK(ReactivateDeadCodes(cb, batch, 2, rng) == 2);
  for (std::size_t n : {1u, 3u}) {
    bool found = false;
    for (std::size_t b = 0; b < batch.rows(); ++b) {
      found |= std::equal(batch.row(b).begin(), batch.row(b).end(), cb.entry(n).begin());
    }
    CHECK(found);
    CHECK(cb.ema_cluster_size[n] == 1.0);
    CHECK(cb.staleness[n] == 0);
    CHECK(cb.usage[n] == 0);
    CHECK(cb.ema_sum[n * 4] == cb.entry(n)[0]);
  }
  CHECK(std::equal(cb.entry(0).begin(), cb.entry(0).end(), fresh.entry(0).begin()));
}

TEST_CASE("reactivated codes win part of the batch") {
  // Two codes sit far from all data and starve; after reactivation each owns
  // the neighbourhood of the latent it was reset to.
  const LatentBatch batch = MakeClusteredLatents(4, 25, 4, 6.0, 0.1, 5);
  Codebook cb = Entries(4, {4.24f, 0, 0, 0, 0, 4.24f, 0, 0, 100, 100, 100, 100,
                            -100, -100, -100, -100});
  cb.ema_cluster_size = {25, 25, 0, 0};
  cb.ema_sum.assign(16, 0.0);
  for (int i = 0; i < 2; ++i) EmaUpdate(cb, batch, Quantize(cb, batch).indices);
  CHECK(cb.staleness[2] == 2);
  CHECK(cb.staleness[3] == 2);
  std::mt19937_64 rng(11);
  REQUIRE(ReactivateDeadCodes(cb, batch, 2, rng) == 2);
  const Quantized q = Quantize(cb, batch);
  for (std::uint32_t n : {2u, 3u}) {
    CHECK(std::count(q.indices.begin(), q.indices.end(), n) >= 1);
  }
}

TEST_CASE("reactivation reaches full usage on an 8-cluster stream") {
  // Two live codes and six dead ones parked far from the data.
  const LatentBatch two = MakeClusteredLatents(2, 20, 8, 6.0, 0.1, 1);
  Codebook cb = testing::CollapsedCodebook(two, 2, 8);
  const LatentBatch first = MakeClusteredLatents(8, 32, 8, 6.0, 0.1, 50);
  CHECK(ComputeCodebookStats(8, Quantize(cb, first).indices).usage_fraction == 0.25);
  const int reached = testing::BatchesToFullUsage(cb, 10, 2);
  CHECK(reached >= kDefaultStalenessThreshold);
  CHECK(reached < 10);

  // Without reactivation the dead codes stay dead.
  Codebook control = testing::CollapsedCodebook(two, 2, 8);
  for (int batch = 0; batch < 10; ++batch) {
    const LatentBatch x = MakeClusteredLatents(8, 32, 8, 6.0, 0.1, 50 + batch);
    EmaUpdate(control, x, Quantize(control, x).indices);
  }
  CHECK(ComputeCodebookStats(8, Quantize(control, first).indices).usage_fraction == 0.25);
}

TEST_CASE("a Lloyd step never increases the commitment loss") {
  const LatentBatch x = GaussianRows(400, 5, 6);
  Codebook cb = KMeansInit(GaussianRows(100, 5, 7), 8, 1, 1);
  const Quantized before = Quantize(cb, x);
  for (std::size_t n = 0; n < 8; ++n) {
    std::vector<double> sum(5, 0.0);
    double count = 0.0;
    for (std::size_t b = 0; b < x.rows(); ++b) {
      if (before.indices[b] != n) continue;
      for (std::size_t i = 0; i < 5; ++i) sum[i] += x.row(b)[i];
      count += 1.0;
    }
    if (count == 0.0) continue;
    for (std::size_t i = 0; i < 5; ++i) cb.entry(n)[i] = static_cast<float>(sum[i] / count);
  }
  CHECK(Quantize(cb, x).commitment_loss <= before.commitment_loss + 1e-9);
}

TEST_CASE("codebook statistics") {
  std::vector<std::uint32_t> uniform;
  for (std::uint32_t n = 0; n < 16; ++n) uniform.insert(uniform.end(), 3, n);
  auto s = ComputeCodebookStats(16, uniform);
  CHECK(s.perplexity == doctest::Approx(16.0));
  CHECK(s.usage_fraction == 1.0);
  s = ComputeCodebookStats(16, std::vector<std::uint32_t>(10, 4));
  CHECK(s.perplexity == doctest::Approx(1.0));
  CHECK(s.usage_fraction == 1.0 / 16);
  std::vector<std::uint32_t> half;
  for (std::uint32_t n = 0; n < 8; ++n) half.insert(half.end(), 2, n * 2);
  s = ComputeCodebookStats(16, half);
  CHECK(s.perplexity == doctest::Approx(8.0));
  CHECK(s.usage_fraction == 0.5);
}

TEST_CASE("binary formats round trip") {
  const auto dir = testing::TempDir("vq");
  Codebook cb = KMeansInit(GaussianRows(64, 5, 1), 8, 4, 2);
  cb.staleness[3] = 7;
  WriteCodebook(dir / "cb.bin", cb);
  const Codebook back = ReadCodebook(dir / "cb.bin");
  CHECK(back.entries == cb.entries);
  CHECK(back.ema_sum == cb.ema_sum);
  CHECK(back.ema_cluster_size == cb.ema_cluster_size);
  CHECK(back.usage == cb.usage);
  CHECK(back.staleness == cb.staleness);
  CHECK(back.decay == cb.decay);
  CHECK(back.smoothing == cb.smoothing);

  const LatentBatch x = GaussianRows(10, 5, 3);
  WriteLatents(dir / "x.bin", x);
  CHECK(ReadLatents(dir / "x.bin") == x);

  const std::vector<std::uint32_t> tokens = {0, 1, 65535, 42};
  WriteTokens(dir / "t.bin", tokens);
  CHECK(std::filesystem::file_size(dir / "t.bin") == 8);
  CHECK(ReadTokens(dir / "t.bin") == tokens);
  const std::vector<std::uint32_t> too_big = {65536};
  CHECK_THROWS_AS(WriteTokens(dir / "bad.bin", too_big), Error);

  {
    std::ofstream junk(dir / "junk.bin", std::ios::binary);
    junk << "XXXXnotacodebook";
  }
  CHECK_THROWS_AS(ReadCodebook(dir / "junk.bin"), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("latent batch validation") {
  CHECK_THROWS_AS(LatentBatch(2, 3, std::vector<float>(5)), Error);
  std::vector<float> nan(6, 0.0f);
  nan[4] = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(LatentBatch(2, 3, nan), Error);
}

}  // namespace
}  // namespace sfoa
