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

#include "sfoa/foa_signal.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sfoa/error.h"

namespace sfoa {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegPerRad = 180.0 / kPi;

void CheckFinite(std::span<const double> samples, const char* what) {
  for (double v : samples) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kNonFinite,
                  std::string(what) + " contains a non-finite sample");
    }
  }
}

}  // namespace

double WrapAngle(double radians) {
  double r = std::remainder(radians, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

Direction Direction::FromRadians(double azimuth, double elevation) {
  if (!std::isfinite(azimuth) || !std::isfinite(elevation)) {
    throw Error(ErrorCode::kInvalidArgument, "direction must be finite");
  }
  if (elevation < -kPi / 2 || elevation > kPi / 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "elevation " + std::to_string(elevation) +
                    " rad outside [-pi/2, pi/2]");
  }
  return Direction(WrapAngle(azimuth), elevation);
}

Direction Direction::FromDegrees(double azimuth_deg, double elevation_deg) {
  if (!std::isfinite(azimuth_deg) || !std::isfinite(elevation_deg) ||
      elevation_deg < -90.0 || elevation_deg > 90.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "elevation " + std::to_string(elevation_deg) +
                    " deg outside [-90, 90]");
  }
  // Range was checked in degrees; absorb rounding at the poles.
  const double el = std::clamp(elevation_deg / kDegPerRad, -kPi / 2, kPi / 2);
  return FromRadians(azimuth_deg / kDegPerRad, el);
}

Direction Direction::FromVector(const Vec3& v) {
  const double horizontal = std::hypot(v[0], v[1]);
  if (!(horizontal > 0.0 || std::abs(v[2]) > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot take the direction of a zero vector");
  }
  return Direction(WrapAngle(std::atan2(v[1], v[0])),
                   std::atan2(v[2], horizontal));
}

double Direction::azimuth_deg() const { return azimuth_ * kDegPerRad; }
double Direction::elevation_deg() const { return elevation_ * kDegPerRad; }

Vec3 Direction::UnitVector() const {
  const double ce = std::cos(elevation_);
  return {std::cos(azimuth_) * ce, std::sin(azimuth_) * ce,
          std::sin(elevation_)};
}

std::array<double, kNumFoaChannels> EncodingGains(const Direction& dir) {
  const Vec3 u = dir.UnitVector();
  std::array<double, kNumFoaChannels> gains{};
  gains[kChannelW] = 1.0;
  gains[kChannelY] = u[1];
  gains[kChannelZ] = u[2];
  gains[kChannelX] = u[0];
  return gains;
}

FoaSignal::FoaSignal(int sample_rate, Channels channels)
    : sample_rate_(sample_rate), channels_(std::move(channels)) {
  if (sample_rate_ <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "sample rate must be positive");
  }
  for (const auto& c : channels_) {
    if (c.size() != channels_[0].size()) {
      throw Error(ErrorCode::kShapeMismatch,
                  "FOA channels must have identical lengths");
    }
    CheckFinite(c, "FOA channel");
  }
}

FoaSignal FoaSignal::Zeros(int sample_rate, std::size_t length) {
  Channels channels;
  for (auto& c : channels) c.assign(length, 0.0);
  return FoaSignal(sample_rate, std::move(channels));
}

FoaSignal EncodeSource(std::span<const double> mono, const Direction& dir,
                       int sample_rate) {
  if (mono.empty()) {
    throw Error(ErrorCode::kEmptyInput, "cannot encode an empty signal");
  }
  CheckFinite(mono, "mono source");
  const auto gains = EncodingGains(dir);
  FoaSignal::Channels channels;
  for (int c = 0; c < kNumFoaChannels; ++c) {
    channels[c].resize(mono.size());
    std::transform(mono.begin(), mono.end(), channels[c].begin(),
                   [g = gains[c]](double v) { return g * v; });
  }
  return FoaSignal(sample_rate, std::move(channels));
}

FoaSignal Mix(std::span<const FoaSignal> signals) {
  if (signals.empty()) {
    throw Error(ErrorCode::kEmptyInput, "cannot mix an empty list");
  }
  const int rate = signals[0].sample_rate();
  std::size_t length = 0;
  for (const auto& s : signals) {
    if (s.sample_rate() != rate) {
      throw Error(ErrorCode::kSampleRateMismatch,
                  "cannot mix signals with different sample rates");
    }
    length = std::max(length, s.length());
  }
  FoaSignal::Channels out;
  for (auto& c : out) c.assign(length, 0.0);
  for (const auto& s : signals) {
    for (int c = 0; c < kNumFoaChannels; ++c) {
      const auto in = s.channel(c);
      for (std::size_t n = 0; n < in.size(); ++n) out[c][n] += in[n];
    }
  }
  return FoaSignal(rate, std::move(out));
}

FoaSignal Scale(const FoaSignal& s, double gain) {
  FoaSignal::Channels out = s.channels();
  for (auto& c : out) {
    for (double& v : c) v *= gain;
  }
  return FoaSignal(s.sample_rate(), std::move(out));
}

FoaSignal RotateAzimuth(const FoaSignal& s, double angle) {
  const double c = std::cos(angle);
  const double sn = std::sin(angle);
  FoaSignal::Channels out = s.channels();
  const auto x = s.channel(kChannelX);
  const auto y = s.channel(kChannelY);
  for (std::size_t n = 0; n < s.length(); ++n) {
    out[kChannelX][n] = c * x[n] - sn * y[n];
    out[kChannelY][n] = sn * x[n] + c * y[n];
  }
  return FoaSignal(s.sample_rate(), std::move(out));
}

}  // namespace sfoa
