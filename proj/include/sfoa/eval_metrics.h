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

#ifndef SFOA_EVAL_METRICS_H_
#define SFOA_EVAL_METRICS_H_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sfoa/foa_signal.h"
#include "sfoa/spatial_consistency.h"
#include "sfoa/stft.h"

namespace sfoa {

// Energy-weighted intensity direction over the bins that pass the SC mask.
// Throws kNoDirectionalEnergy when every bin is masked out.
Direction EstimateDoa(const FoaSignal& signal, const ScConfig& config = {},
                      const StftParams& params = StftParams::Default());

// Great-circle angle in degrees, [0, 180].
double AngularErrorDeg(const Direction& a, const Direction& b);
// Circular azimuth difference in degrees, [0, 180].
double AzimuthErrorDeg(const Direction& a, const Direction& b);
double ElevationErrorDeg(const Direction& a, const Direction& b);

struct StftResolution {
  int fft_size;
  int hop;
  int win_length;
};

// Multi-resolution defaults of the auraloss package.
inline constexpr std::array<StftResolution, 3> kDistanceResolutions = {{
    {1024, 120, 600},
    {2048, 240, 1200},
    {512, 50, 240},
}};
// Magnitudes are sqrt(max(|X|^2, eps)) in the log term.
inline constexpr double kLogMagnitudeEps = 1e-8;
inline constexpr int kMelBands = 80;
inline constexpr double kMelLogEps = 1e-5;

struct StftDistanceTerms {
  double spectral_convergence = 0.0;
  double log_magnitude = 0.0;
  double total() const { return spectral_convergence + log_magnitude; }
};

// Per channel: spectral convergence |||Y| - |X|||_F / |||X|||_F plus mean
// |ln|X| - ln|Y||, each averaged over the resolutions; then averaged over
// the four channels. `x` is the reference.
StftDistanceTerms StftDistanceBreakdown(const FoaSignal& x, const FoaSignal& y);
double StftDistance(const FoaSignal& x, const FoaSignal& y);

// Mean |log(eps + mel_x) - log(eps + mel_y)| over frames, bands and channels
// (80 HTK bands, Hann 1024 / hop 256).
double MelDistance(const FoaSignal& x, const FoaSignal& y);

struct EvalReport {
  std::string name;
  std::optional<double> azimuth_error_deg;
  std::optional<double> elevation_error_deg;
  std::optional<double> angular_error_deg;
  std::optional<Direction> input_doa;
  std::optional<Direction> recon_doa;
  bool compared_to_truth = false;
  double stft_distance = 0.0;
  double mel_distance = 0.0;
};

// Spatial errors compare the reconstruction's estimated DOA with `truth`
// when given, otherwise with the input's estimate. They stay empty when a
// DOA cannot be estimated.
EvalReport EvaluatePair(const FoaSignal& input, const FoaSignal& recon,
                        const std::optional<Direction>& truth,
                        const ScConfig& config = {});

struct EvalAggregate {
  std::size_t files = 0;
  std::size_t spatial_files = 0;
  double azimuth_error_deg = 0.0;
  double elevation_error_deg = 0.0;
  double angular_error_deg = 0.0;
  double stft_distance = 0.0;
  double mel_distance = 0.0;
};

// Arithmetic means (compensated summation); spatial means cover the reports
// that have spatial errors.
EvalAggregate Aggregate(std::span<const EvalReport> reports);

nlohmann::json ReportToJson(const EvalReport& report);
nlohmann::json AggregateToJson(const EvalAggregate& aggregate);
std::string ReportsToCsv(std::span<const EvalReport> reports);

}  // namespace sfoa

#endif  // SFOA_EVAL_METRICS_H_
