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

#ifndef SFOA_FOA_SIGNAL_H_
#define SFOA_FOA_SIGNAL_H_

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "sfoa/grid.h"

namespace sfoa {

// First-order ambisonics, ACN channel order with SN3D normalization.
inline constexpr int kNumFoaChannels = 4;
inline constexpr int kChannelW = 0;
inline constexpr int kChannelY = 1;
inline constexpr int kChannelZ = 2;
inline constexpr int kChannelX = 3;

inline constexpr int kDefaultSampleRate = 24000;

// Azimuth counterclockwise from the front (+x toward +y), elevation upward.
// Both in radians. Azimuth is always kept in (-pi, pi].
class Direction {
 public:
  Direction() = default;

  // Wraps azimuth; throws kInvalidArgument for elevation outside
  // [-pi/2, pi/2] or non-finite values.
  static Direction FromRadians(double azimuth, double elevation);
  static Direction FromDegrees(double azimuth_deg, double elevation_deg);
  // Direction of a nonzero 3-vector (x, y, z).
  static Direction FromVector(const Vec3& v);

  double azimuth() const { return azimuth_; }
  double elevation() const { return elevation_; }
  double azimuth_deg() const;
  double elevation_deg() const;

  Vec3 UnitVector() const;

  friend bool operator==(const Direction&, const Direction&) = default;

 private:
  Direction(double azimuth, double elevation)
      : azimuth_(azimuth), elevation_(elevation) {}

  double azimuth_ = 0.0;
  double elevation_ = 0.0;
};

// Wraps an angle into (-pi, pi].
double WrapAngle(double radians);

// SN3D first-order gains in ACN order (W, Y, Z, X).
std::array<double, kNumFoaChannels> EncodingGains(const Direction& dir);

class FoaSignal {
 public:
  using Channels = std::array<std::vector<double>, kNumFoaChannels>;

  FoaSignal() = default;
  // Validates equal channel lengths, finite samples and a positive rate.
  FoaSignal(int sample_rate, Channels channels);
  // All-zero signal.
  static FoaSignal Zeros(int sample_rate, std::size_t length);

  int sample_rate() const { return sample_rate_; }
  std::size_t length() const { return channels_[0].size(); }
  const Channels& channels() const { return channels_; }
  std::span<const double> channel(int c) const { return channels_[c]; }

  double duration_seconds() const {
    return static_cast<double>(length()) / sample_rate_;
  }

  friend bool operator==(const FoaSignal&, const FoaSignal&) = default;

 private:
  int sample_rate_ = kDefaultSampleRate;
  Channels channels_;
};

// Plane-wave panning of a mono signal.
FoaSignal EncodeSource(std::span<const double> mono, const Direction& dir,
                       int sample_rate = kDefaultSampleRate);

// Sample-wise sum; shorter signals are zero-padded at the tail.
FoaSignal Mix(std::span<const FoaSignal> signals);

FoaSignal Scale(const FoaSignal& s, double gain);

// Rotation about the vertical axis by `angle` radians (counterclockwise).
FoaSignal RotateAzimuth(const FoaSignal& s, double angle);

}  // namespace sfoa

#endif  // SFOA_FOA_SIGNAL_H_
