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

#include "sfoa/eval_metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "sfoa/dirac.h"
#include "sfoa/error.h"

namespace sfoa {

namespace {

using nlohmann::json;

constexpr double kDegPerRad = 180.0 / std::numbers::pi;

void CheckComparable(const FoaSignal& x, const FoaSignal& y) {
  if (x.sample_rate() != y.sample_rate()) {
    throw Error(ErrorCode::kSampleRateMismatch,
                "signals have different sample rates");
  }
  if (x.length() != y.length()) {
    throw Error(ErrorCode::kShapeMismatch,
                "signals differ in length (" + std::to_string(x.length()) +
                    " vs " + std::to_string(y.length()) + ")");
  }
}

class KahanSum {
 public:
  void Add(double v) {
    const double y = v - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

json DirectionJson(const std::optional<Direction>& d) {
  if (!d) return nullptr;
  return {{"azimuth_deg", d->azimuth_deg()}, {"elevation_deg", d->elevation_deg()}};
}

json OptionalJson(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

Direction EstimateDoa(const FoaSignal& signal, const ScConfig& config,
                      const StftParams& params) {
  config.Validate();
  const FoaSpectrum spec = ComputeSpectrum(signal, params);
  const DiracField field = Analyze(spec, config.window);
  const RealGrid mask = Mask(field.energy, field.diffuseness, config);
  const RealGrid weights = Weights(mask, field.energy, field.diffuseness);
  Vec3 v = {0.0, 0.0, 0.0};
  double total_weight = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double w = weights.data()[i];
    if (w == 0.0) continue;
    total_weight += w;
    const Vec3& intensity = field.intensity.data()[i];
    for (int j = 0; j < 3; ++j) v[j] += w * intensity[j];
  }
  if (total_weight == 0.0 || Norm(v) == 0.0) {
    throw Error(ErrorCode::kNoDirectionalEnergy,
                "no directional energy: every time-frequency bin is masked");
  }
  return Direction::FromVector(v);
}

double AngularErrorDeg(const Direction& a, const Direction& b) {
  // Same angle as acos(clamp(u.v)), but well conditioned near 0 and 180.
  const Vec3 u = a.UnitVector(), v = b.UnitVector();
  const Vec3 cross = {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2],
                      u[0] * v[1] - u[1] * v[0]};
  return std::atan2(Norm(cross), Dot(u, v)) * kDegPerRad;
}

double AzimuthErrorDeg(const Direction& a, const Direction& b) {
  return std::abs(WrapAngle(a.azimuth() - b.azimuth())) * kDegPerRad;
}

double ElevationErrorDeg(const Direction& a, const Direction& b) {
  return std::abs(a.elevation() - b.elevation()) * kDegPerRad;
}

StftDistanceTerms StftDistanceBreakdown(const FoaSignal& x, const FoaSignal& y) {
  CheckComparable(x, y);
  const double floor = std::sqrt(kLogMagnitudeEps);
  StftDistanceTerms out;
  for (int c = 0; c < kNumFoaChannels; ++c) {
    for (const auto& res : kDistanceResolutions) {
      const auto params =
          StftParams::AnalysisOnly(res.fft_size, res.hop, res.win_length, true);
      const ComplexGrid sx = Stft(x.channel(c), params);
      const ComplexGrid sy = Stft(y.channel(c), params);
      double diff_sq = 0.0;
      double ref_sq = 0.0;
      double log_sum = 0.0;
      for (std::size_t i = 0; i < sx.size(); ++i) {
        const double mx = std::abs(sx.data()[i]);
        const double my = std::abs(sy.data()[i]);
        diff_sq += (my - mx) * (my - mx);
        ref_sq += mx * mx;
        log_sum += std::abs(std::log(std::max(mx, floor)) - std::log(std::max(my, floor)));
      }
      const double sc = diff_sq == 0.0 ? 0.0 : std::sqrt(diff_sq) / (std::sqrt(ref_sq) + 1e-12);
      out.spectral_convergence += sc;
      out.log_magnitude += log_sum / static_cast<double>(sx.size());
    }
  }
  const double n = static_cast<double>(kNumFoaChannels * kDistanceResolutions.size());
  out.spectral_convergence /= n;
  out.log_magnitude /= n;
  return out;
}

double StftDistance(const FoaSignal& x, const FoaSignal& y) {
  return StftDistanceBreakdown(x, y).total();
}

double MelDistance(const FoaSignal& x, const FoaSignal& y) {
  CheckComparable(x, y);
  const StftParams params = StftParams::Default();
  double total = 0.0;
  for (int c = 0; c < kNumFoaChannels; ++c) {
    const RealGrid mx = MelSpectrogram(x.channel(c), x.sample_rate(), kMelBands, params);
    const RealGrid my = MelSpectrogram(y.channel(c), y.sample_rate(), kMelBands, params);
    double acc = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
      acc += std::abs(std::log(kMelLogEps + mx.data()[i]) -
                      std::log(kMelLogEps + my.data()[i]));
    }
    total += acc / static_cast<double>(mx.size());
  }
  return total / kNumFoaChannels;
}

EvalReport EvaluatePair(const FoaSignal& input, const FoaSignal& recon,
                        const std::optional<Direction>& truth,
                        const ScConfig& config) {
  CheckComparable(input, recon);
  EvalReport report;
  report.stft_distance = StftDistance(input, recon);
  report.mel_distance = MelDistance(input, recon);

  auto try_estimate = [&](const FoaSignal& s) -> std::optional<Direction> {
    try {
      return EstimateDoa(s, config);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kNoDirectionalEnergy) return std::nullopt;
      throw;
    }
  };
  report.input_doa = try_estimate(input);
  report.recon_doa = try_estimate(recon);
  report.compared_to_truth = truth.has_value();
  const std::optional<Direction> reference = truth ? truth : report.input_doa;
  if (reference && report.recon_doa) {
    report.azimuth_error_deg = AzimuthErrorDeg(*report.recon_doa, *reference);
    report.elevation_error_deg = ElevationErrorDeg(*report.recon_doa, *reference);
    report.angular_error_deg = AngularErrorDeg(*report.recon_doa, *reference);
  }
  return report;
}

EvalAggregate Aggregate(std::span<const EvalReport> reports) {
  EvalAggregate agg;
  KahanSum az, el, ang, stft, mel;
  for (const auto& r : reports) {
    ++agg.files;
    stft.Add(r.stft_distance);
    mel.Add(r.mel_distance);
    if (r.angular_error_deg) {
      ++agg.spatial_files;
      az.Add(*r.azimuth_error_deg);
      el.Add(*r.elevation_error_deg);
      ang.Add(*r.angular_error_deg);
    }
  }
  if (agg.files) {
    agg.stft_distance = stft.value() / static_cast<double>(agg.files);
    agg.mel_distance = mel.value() / static_cast<double>(agg.files);
  }
  if (agg.spatial_files) {
    const auto n = static_cast<double>(agg.spatial_files);
    agg.azimuth_error_deg = az.value() / n;
    agg.elevation_error_deg = el.value() / n;
    agg.angular_error_deg = ang.value() / n;
  }
  return agg;
}

json ReportToJson(const EvalReport& r) {
  return {{"name", r.name},
          {"azimuth_error_deg", OptionalJson(r.azimuth_error_deg)},
          {"elevation_error_deg", OptionalJson(r.elevation_error_deg)},
          {"angular_error_deg", OptionalJson(r.angular_error_deg)},
          {"input_doa", DirectionJson(r.input_doa)},
          {"recon_doa", DirectionJson(r.recon_doa)},
          {"compared_to_truth", r.compared_to_truth},
          {"stft_distance", r.stft_distance},
          {"mel_distance", r.mel_distance}};
}

json AggregateToJson(const EvalAggregate& a) {
  return {{"files", a.files},
          {"spatial_files", a.spatial_files},
          {"azimuth_error_deg", a.azimuth_error_deg},
          {"elevation_error_deg", a.elevation_error_deg},
          {"angular_error_deg", a.angular_error_deg},
          {"stft_distance", a.stft_distance},
          {"mel_distance", a.mel_distance}};
}

std::string ReportsToCsv(std::span<const EvalReport> reports) {
  std::string out =
      "name,azimuth_error_deg,elevation_error_deg,angular_error_deg,"
      "stft_distance,mel_distance\n";
  char buf[64];
  auto field = [&](const std::optional<double>& v) {
    if (!v) return std::string();
    std::snprintf(buf, sizeof(buf), "%.17g", *v);
    return std::string(buf);
  };
  for (const auto& r : reports) {
    out += r.name + ',' + field(r.azimuth_error_deg) + ',' +
           field(r.elevation_error_deg) + ',' + field(r.angular_error_deg) + ',' +
           field(r.stft_distance) + ',' + field(r.mel_distance) + '\n';
  }
  return out;
}

}  // namespace sfoa
