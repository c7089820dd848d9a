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
#include "sfoa/eval_metrics.h"
#include "sfoa/scene_gen.h"
#include "test_util.h"

namespace sfoa {
namespace {

Direction Deg(double az, double el) { return Direction::FromDegrees(az, el); }

FoaSignal Mirror(const FoaSignal& s) {
  FoaSignal::Channels ch;
  for (int c = 0; c < 4; ++c) {
    ch[c].assign(s.channel(c).begin(), s.channel(c).end());
    if (c == kChannelX || c == kChannelY) {
      for (double& v : ch[c]) v = -v;
    }
  }
  return FoaSignal(s.sample_rate(), ch);
}

FoaSignal Plus(const FoaSignal& a, const FoaSignal& b) {
  return Mix(std::vector<FoaSignal>{a, b});
}

TEST_CASE("angular error examples") {
  CHECK(AngularErrorDeg(Deg(20, 30), Deg(20, 30)) == 0.0);
  CHECK(AngularErrorDeg(Deg(0, 0), Deg(180, 0)) == doctest::Approx(180.0));
  CHECK(AngularErrorDeg(Deg(0, 0), Deg(90, 0)) == doctest::Approx(90.0));
  CHECK(AzimuthErrorDeg(Deg(170, 0), Deg(-170, 0)) == doctest::Approx(20.0));
  CHECK(AzimuthErrorDeg(Deg(0, 0), Deg(180, 0)) == doctest::Approx(180.0));
  CHECK(ElevationErrorDeg(Deg(0, -20), Deg(0, 30)) == doctest::Approx(50.0));
}

TEST_CASE("angular error is a metric on the sphere") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> az(-180, 180), z(-1, 1);
  auto random_dir = [&] {
    return Deg(az(rng), std::asin(z(rng)) * 180.0 / std::numbers::pi);
  };
  for (int i = 0; i < 10000; ++i) {
    const Direction a = random_dir(), b = random_dir(), c = random_dir();
    const double ab = AngularErrorDeg(a, b);
    CHECK(ab >= 0.0);
    CHECK(ab <= 180.0);
    CHECK(ab == AngularErrorDeg(b, a));
    CHECK(AngularErrorDeg(a, a) == 0.0);
    CHECK(ab <= AngularErrorDeg(a, c) + AngularErrorDeg(c, b) + 1e-9);
    CHECK(AzimuthErrorDeg(a, b) <= 180.0);
  }
}

TEST_CASE("DOA of clean sources") {
  const auto audio = testing::WhiteNoise(12000, 1);
  const Direction front = EstimateDoa(EncodeSource(audio, Direction()));
  CHECK(std::abs(front.azimuth_deg()) < 0.5);
  CHECK(std::abs(front.elevation_deg()) < 0.5);

  const FoaSignal s = EncodeSource(audio, Deg(-65, 20));
  const Direction base = EstimateDoa(s);
  for (double phi : {0.3, 1.0, 2.5, -2.0}) {
    const Direction r = EstimateDoa(RotateAzimuth(s, phi));
    CHECK(AngularErrorDeg(r, Deg(base.azimuth_deg() + phi * 180 / std::numbers::pi,
                                 base.elevation_deg())) < 0.5);
  }
  CHECK(AngularErrorDeg(EstimateDoa(Scale(s, 7.0)), base) < 0.5);

  // Shift by an integer number of hops.
  std::vector<double> shifted(256 * 3, 0.0);
  shifted.insert(shifted.end(), audio.begin(), audio.end());
  CHECK(AngularErrorDeg(EstimateDoa(EncodeSource(shifted, Deg(-65, 20))), base) < 0.5);

  try {
    EstimateDoa(FoaSignal::Zeros(24000, 4800));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNoDirectionalEnergy);
  }
}

TEST_CASE("DOA with a diffuse background") {
  SceneManifest m;
  m.sources.push_back({Deg(30, 10), 1.0, "a"});
  m.diffuse_level = 0.05;
  m.seed = 8;
  const Scene s = GenerateScene(m, {{"a", testing::WhiteNoise(24000, 2)}});
  CHECK(AngularErrorDeg(EstimateDoa(s.signal), s.truth[0]) < 2.0);
}

TEST_CASE("STFT distance closed forms") {
  const FoaSignal x = testing::RandomFoa(24000, 3, 100.0);
  CHECK(StftDistance(x, x) == 0.0);

  const auto half = StftDistanceBreakdown(x, Scale(x, 0.5));
  CHECK(std::abs(half.spectral_convergence - 0.5) < 1e-6);
  CHECK(std::abs(half.log_magnitude - std::log(2.0)) < 1e-6);
  CHECK(std::abs(StftDistance(x, Scale(x, 0.5)) - (0.5 + std::log(2.0))) < 1e-6);

  const auto zero = StftDistanceBreakdown(x, FoaSignal::Zeros(24000, 24000));
  CHECK(zero.spectral_convergence == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(zero.log_magnitude > 0.0);

  const FoaSignal y = testing::RandomFoa(24000, 4);
  CHECK(StftDistance(x, y) > 0.0);
  CHECK_THROWS_AS(StftDistance(x, testing::RandomFoa(100, 1)), Error);
  CHECK_THROWS_AS(StftDistance(x, FoaSignal::Zeros(48000, 24000)), Error);
}

TEST_CASE("mel distance closed forms") {
  const FoaSignal x = testing::RandomFoa(24000, 5, 100.0);
  const FoaSignal y = testing::RandomFoa(24000, 6);
  CHECK(MelDistance(x, x) == 0.0);
  CHECK(MelDistance(x, y) == MelDistance(y, x));
  CHECK(MelDistance(x, y) > 0.0);
  CHECK(std::abs(MelDistance(x, Scale(x, 2.0)) - std::log(4.0)) < 1e-6);
  const FoaSignal silent = FoaSignal::Zeros(24000, 24000);
  CHECK(MelDistance(silent, silent) == 0.0);
}

TEST_CASE("evaluate_pair") {
  const auto audio = testing::WhiteNoise(24000, 9);
  const FoaSignal front = EncodeSource(audio, Direction());

  EvalReport same = EvaluatePair(front, front, Direction());
  REQUIRE(same.angular_error_deg.has_value());
  CHECK(*same.angular_error_deg < 1e-4);
  CHECK(*same.azimuth_error_deg < 1e-4);
  CHECK(*same.elevation_error_deg < 1e-4);
  CHECK(same.compared_to_truth);
  CHECK(same.stft_distance == 0.0);
  CHECK(same.mel_distance == 0.0);

  const EvalReport mirrored = EvaluatePair(front, Mirror(front), Direction());
  CHECK(*mirrored.angular_error_deg == doctest::Approx(180.0).epsilon(1e-6));
  CHECK(*mirrored.azimuth_error_deg == doctest::Approx(180.0).epsilon(1e-6));

  // 40 dB SNR: noise RMS 1% of the W channel on every channel.
  const FoaSignal noisy = Plus(front, testing::RandomFoa(24000, 10, 0.01));
  const EvalReport n = EvaluatePair(front, noisy, std::nullopt);
  CHECK_FALSE(n.compared_to_truth);
  CHECK(*n.angular_error_deg < 2.0);
  CHECK(n.stft_distance > 0.0);
  CHECK(n.mel_distance > 0.0);

  const FoaSignal silent = FoaSignal::Zeros(24000, 24000);
  const EvalReport empty = EvaluatePair(silent, silent, Direction());
  CHECK_FALSE(empty.angular_error_deg.has_value());
  CHECK_FALSE(empty.recon_doa.has_value());

  const EvalReport no_ref = EvaluatePair(silent, front, std::nullopt);
  CHECK_FALSE(no_ref.angular_error_deg.has_value());
  CHECK(no_ref.recon_doa.has_value());
}

TEST_CASE("median angular error grows with the noise level") {
  const std::vector<double> levels = {0.02, 0.05, 0.1, 0.2, 0.4, 0.8};
  const auto medians = testing::MedianErrorsUnderNoise(levels, 50, 4800);
  for (std::size_t i = 1; i < medians.size(); ++i) CHECK(medians[i] >= medians[i - 1]);
  CHECK(medians.back() > medians.front());
}

TEST_CASE("aggregate and serialization") {
  EvalReport a, b, c;
  a.name = "a";
  a.angular_error_deg = 2.0;
  a.azimuth_error_deg = 1.0;
  a.elevation_error_deg = 0.5;
  a.stft_distance = 1.0;
  a.mel_distance = 3.0;
  b = a;
  b.name = "b";
  b.angular_error_deg = 4.0;
  b.stft_distance = 2.0;
  c.name = "c";
  c.stft_distance = 3.0;
  c.mel_distance = 6.0;
  const std::vector<EvalReport> reports = {a, b, c};
  const EvalAggregate agg = Aggregate(reports);
  CHECK(agg.files == 3);
  CHECK(agg.spatial_files == 2);
  CHECK(agg.angular_error_deg == 3.0);
  CHECK(agg.azimuth_error_deg == 1.0);
  CHECK(agg.stft_distance == 2.0);
  CHECK(agg.mel_distance == 4.0);
  CHECK(Aggregate(std::vector<EvalReport>{}).files == 0);

  const auto j = ReportToJson(c);
  CHECK(j["name"] == "c");
  CHECK(j["angular_error_deg"].is_null());
  CHECK(j["stft_distance"] == 3.0);
  CHECK(AggregateToJson(agg)["spatial_files"] == 2);

  const std::string csv = ReportsToCsv(reports);
  CHECK(csv.rfind("name,azimuth_error_deg", 0) == 0);
  CHECK(csv.find("\nc,,,,3,6\n") != std::string::npos);
}

}  // namespace
}  // namespace sfoa
