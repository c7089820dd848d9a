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

#include <cmath>
#include <numbers>

#include "sfoa/error.h"
#include "sfoa/stft.h"
#include "test_util.h"

namespace sfoa {
namespace {

constexpr double kPi = std::numbers::pi;

double MaxAbs(const ComplexGrid& g) {
  double m = 0.0;
  for (const auto& v : g.data()) m = std::max(m, std::abs(v));
  return m;
}

// Interior samples: those whose every overlapping frame exists.
void CheckRoundTrip(std::span<const double> x, const StftParams& p, double tol) {
  const auto y = Istft(Stft(x, p), p, x.size());
  REQUIRE(y.size() == x.size());
  const std::size_t margin = p.center() ? 0 : static_cast<std::size_t>(p.fft_size());
  double err = 0.0;
  for (std::size_t n = margin; n + margin < x.size(); ++n) {
    err = std::max(err, std::abs(x[n] - y[n]));
  }
  CHECK(err < tol);
}

TEST_CASE("zero input gives a zero grid and zero grid a zero signal") {
  const auto p = StftParams::Default();
  const std::vector<double> zeros(5000, 0.0);
  const ComplexGrid g = Stft(zeros, p);
  CHECK(g.frames() == p.NumFrames(5000));
  CHECK(g.bins() == 513);
  CHECK(MaxAbs(g) == 0.0);
  for (double v : Istft(g, p, 5000)) CHECK(v == 0.0);
}

TEST_CASE("frame count for centered and uncentered transforms") {
  const auto c = StftParams::Create(1024, 256, 1024, true);
  CHECK(c.NumFrames(24000) == 1 + (24000 + 255) / 256);
  CHECK(c.NumFrames(0) == 1);
  const auto u = StftParams::Create(1024, 256, 1024, false);
  CHECK(u.NumFrames(1024) == 1);
  CHECK(u.NumFrames(1025) == 2);
}

TEST_CASE("impulse at a frame centre has the window's flat spectrum") {
  const auto p = StftParams::Default();
  std::vector<double> x(4096, 0.0);
  const std::size_t n0 = 5 * 256;
  x[n0] = 1.0;
  const ComplexGrid g = Stft(x, p);
  const auto w = p.window();
  for (std::size_t t = 0; t < g.frames(); ++t) {
    const long offset = static_cast<long>(n0) + 512 - static_cast<long>(t * 256);
    const double want = (offset >= 0 && offset < 1024) ? w[offset] : 0.0;
    for (std::size_t k = 0; k < g.bins(); ++k) {
      CHECK(std::abs(g(t, k)) == doctest::Approx(want).epsilon(1e-12));
    }
  }
  CHECK(std::abs(g(5, 100)) == doctest::Approx(1.0));
}

TEST_CASE("bin-centred sine concentrates its energy in the Hann main lobe") {
  // Hann spectrum at offsets 0, +-1 has amplitudes N/2, N/4: the centre bin
  // holds 0.25 / (0.25 + 2 * 0.0625) = 2/3 of the energy, the main lobe all
  // of it up to the negative-frequency leakage.
  const auto p = StftParams::Default();
  const int k0 = 32;
  std::vector<double> x(24000);
  for (std::size_t n = 0; n < x.size(); ++n) x[n] = std::sin(2 * kPi * k0 * n / 1024.0);
  const ComplexGrid g = Stft(x, p);
  for (std::size_t t : {10u, 40u, 80u}) {
    double total = 0.0;
    for (std::size_t k = 0; k < g.bins(); ++k) total += std::norm(g(t, k));
    const double centre = std::norm(g(t, k0));
    const double lobe = centre + std::norm(g(t, k0 - 1)) + std::norm(g(t, k0 + 1));
    CHECK(lobe / total > 0.99);
    CHECK(centre / total == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
  }
}

TEST_CASE("Parseval: STFT energy equals window-weighted signal energy") {
  for (bool center : {true, false}) {
    const auto p = StftParams::AnalysisOnly(512, 128, 400, center);
    const auto x = testing::WhiteNoise(7000, 11);
    const ComplexGrid g = Stft(x, p);
    double spectral = 0.0;
    const std::size_t n_fft = 512;
    for (std::size_t t = 0; t < g.frames(); ++t) {
      for (std::size_t k = 0; k < g.bins(); ++k) {
        const double weight = (k == 0 || k == n_fft / 2) ? 1.0 : 2.0;
        spectral += weight * std::norm(g(t, k));
      }
    }
    spectral /= n_fft;
    // Oracle: sum_n x[n]^2 * sum_t w[n + pad - t hop]^2, computed directly.
    const auto w = p.window();
    const long pad = center ? 256 : 0;
    double temporal = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) {
      double coverage = 0.0;
      for (std::size_t t = 0; t < g.frames(); ++t) {
        const long j = static_cast<long>(n) + pad - static_cast<long>(t * 128);
        if (j >= 0 && j < 512) coverage += w[j] * w[j];
      }
      temporal += x[n] * x[n] * coverage;
    }
    CHECK(std::abs(spectral - temporal) <= 1e-9 * temporal);
  }
}

TEST_CASE("STFT is linear") {
  const auto p = StftParams::Create(256, 64, 256);
  const auto x = testing::WhiteNoise(3000, 1);
  const auto y = testing::WhiteNoise(3000, 2);
  std::vector<double> z(3000);
  for (std::size_t n = 0; n < z.size(); ++n) z[n] = 0.7 * x[n] - 2.5 * y[n];
  const auto gx = Stft(x, p), gy = Stft(y, p), gz = Stft(z, p);
  double err = 0.0;
  for (std::size_t i = 0; i < gz.size(); ++i) {
    err = std::max(err, std::abs(gz.data()[i] - (0.7 * gx.data()[i] - 2.5 * gy.data()[i])));
  }
  CHECK(err < 1e-9);
}

TEST_CASE("istft inverts stft") {
  CheckRoundTrip(testing::WhiteNoise(24000, 4), StftParams::Default(), 1e-9);
  std::vector<double> chirp(24000);
  for (std::size_t n = 0; n < chirp.size(); ++n) {
    const double t = n / 24000.0;
    chirp[n] = 0.5 * std::sin(2 * kPi * (100.0 * t + 2000.0 * t * t));
  }
  CheckRoundTrip(chirp, StftParams::Default(), 1e-9);
}

TEST_CASE("istft inverts stft over random parameter sets") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const int fft = 64 << (rng() % 4);
    const int win = (rng() % 2) ? fft : fft / 2;
    const int hop = win / static_cast<int>(2 << (rng() % 3));
    const bool center = rng() % 2;
    const auto p = StftParams::Create(fft, hop, win, center);
    const std::size_t len = 500 + rng() % 3000;
    CAPTURE(fft);
    CAPTURE(win);
    CAPTURE(hop);
    CAPTURE(center);
    CheckRoundTrip(testing::WhiteNoise(len, trial), p, 1e-9);
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(StftParams::Create(512, 50, 240), Error);
  try {
    StftParams::Create(512, 50, 240);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNotCola);
  }
  CHECK_NOTHROW(StftParams::AnalysisOnly(512, 50, 240));
  CHECK_THROWS_AS(StftParams::Create(256, 300, 256), Error);
  CHECK_THROWS_AS(StftParams::Create(256, 64, 512), Error);

  const auto analysis = StftParams::AnalysisOnly(512, 50, 240);
  const auto g = Stft(testing::WhiteNoise(1000, 1), analysis);
  CHECK_THROWS_AS(Istft(g, analysis), Error);
}

TEST_CASE("istft rejects grids that do not match the parameters") {
  const auto p = StftParams::Default();
  const ComplexGrid wrong_bins(10, 257);
  try {
    Istft(wrong_bins, p);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kShapeMismatch);
  }
  const ComplexGrid g(10, 513);
  CHECK_THROWS_AS(Istft(g, p, 100000), Error);
}

TEST_CASE("StftAdjoint is the transpose of Stft") {
  // <Stft(x), G> = <x, Stft^T G> in the real inner product.
  for (bool center : {true, false}) {
    const auto p = StftParams::Create(128, 32, 96, center);
    const std::size_t len = 777;
    const auto x = testing::WhiteNoise(len, 3);
    const ComplexGrid sx = Stft(x, p);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> normal;
    ComplexGrid g(sx.frames(), sx.bins());
    for (auto& v : g.data()) v = Complex(normal(rng), normal(rng));
    double lhs = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      lhs += sx.data()[i].real() * g.data()[i].real() +
             sx.data()[i].imag() * g.data()[i].imag();
    }
    const auto adj = StftAdjoint(g, p, len);
    double rhs = 0.0;
    for (std::size_t n = 0; n < len; ++n) rhs += x[n] * adj[n];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
  }
}

TEST_CASE("spectrum synthesis round trip for FOA signals") {
  const FoaSignal s = testing::RandomFoa(6000, 8);
  const FoaSignal back = Synthesize(ComputeSpectrum(s));
  for (int c = 0; c < 4; ++c) {
    CHECK(testing::MaxAbsDiff(back.channel(c), s.channel(c)) < 1e-9);
  }
}

TEST_CASE("mel filterbank and spectrogram") {
  const auto p = StftParams::Default();
  const RealGrid fb = MelFilterbank(24000, 80, p);
  CHECK(fb.frames() == 80);
  CHECK(fb.bins() == 513);
  for (std::size_t m = 0; m < 80; ++m) {
    double sum = 0.0;
    for (double v : fb.row(m)) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(sum > 0.0);
  }
  // Many narrow bands still get at least one bin.
  const RealGrid dense = MelFilterbank(24000, 400, p);
  for (std::size_t m = 0; m < 400; ++m) {
    double sum = 0.0;
    for (double v : dense.row(m)) sum += v;
    CHECK(sum > 0.0);
  }
  CHECK_THROWS_AS(MelFilterbank(24000, 514, p), Error);
  CHECK_THROWS_AS(MelFilterbank(24000, 0, p), Error);

  const std::vector<double> zeros(4000, 0.0);
  const RealGrid mz = MelSpectrogram(zeros, 24000, 80, p);
  for (double v : mz.data()) CHECK(v == 0.0);

  const auto noise = testing::WhiteNoise(8000, 2);
  const RealGrid mn = MelSpectrogram(noise, 24000, 80, p);
  CHECK(mn.frames() == p.NumFrames(8000));
  CHECK(mn.bins() == 80);
  for (double v : mn.data()) CHECK(v > 0.0);
}

TEST_CASE("HTK mel scale") {
  CHECK(HzToMel(0.0) == 0.0);
  CHECK(HzToMel(700.0) == doctest::Approx(2595.0 * std::log10(2.0)));
  CHECK(MelToHz(HzToMel(4321.0)) == doctest::Approx(4321.0));
}

}  // namespace
}  // namespace sfoa
