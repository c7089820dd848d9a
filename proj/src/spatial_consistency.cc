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

#include "sfoa/spatial_consistency.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "sfoa/error.h"

namespace sfoa {

namespace {

void CheckSameShape(const FoaSpectrum& input, const FoaSpectrum& recon) {
  if (input.frames() != recon.frames() || input.bins() != recon.bins()) {
    throw Error(ErrorCode::kShapeMismatch,
                "input spectrum is " + std::to_string(input.frames()) + "x" +
                    std::to_string(input.bins()) + ", reconstruction is " +
                    std::to_string(recon.frames()) + "x" +
                    std::to_string(recon.bins()));
  }
}

double BinAlignment(const Vec3& a, const Vec3& b, double epsilon) {
  // sqrt(|a|^2 |b|^2) rather than |a| |b|: for a == b the square root of a
  // rounded square is exact, so s is exactly 1 and the loss exactly 0.
  const double denom = std::sqrt(Dot(a, a) * Dot(b, b)) + epsilon;
  return denom > 0.0 ? std::clamp(Dot(a, b) / denom, -1.0, 1.0) : 0.0;
}

// Mask and weights of the input field.
struct InputTerms {
  DiracField field;
  RealGrid mask;
  RealGrid weights;
};

InputTerms AnalyzeInput(const FoaSpectrum& input, const ScConfig& config) {
  InputTerms terms;
  terms.field = Analyze(input, config.window);
  terms.mask = Mask(terms.field.energy, terms.field.diffuseness, config);
  terms.weights =
      Weights(terms.mask, terms.field.energy, terms.field.diffuseness);
  return terms;
}

}  // namespace

void ScConfig::Validate() const {
  if (!(energy_threshold > 0.0) || !std::isfinite(energy_threshold)) {
    throw Error(ErrorCode::kInvalidArgument, "energy threshold must be > 0");
  }
  if (!(diffuseness_threshold > 0.0 && diffuseness_threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "diffuseness threshold must be in (0, 1]");
  }
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must be >= 0");
  }
  if (window < 1 || window % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "diffuseness window must be a positive odd frame count");
  }
}

RealGrid Alignment(const VectorGrid& input, const VectorGrid& recon,
                   double epsilon) {
  if (!input.SameShape(recon)) {
    throw Error(ErrorCode::kShapeMismatch, "intensity grids differ in shape");
  }
  RealGrid s(input.frames(), input.bins());
  for (std::size_t i = 0; i < s.size(); ++i) {
    s.data()[i] = BinAlignment(input.data()[i], recon.data()[i], epsilon);
  }
  return s;
}

RealGrid Mask(const RealGrid& energy, const RealGrid& diffuseness,
              const ScConfig& config) {
  if (!energy.SameShape(diffuseness)) {
    throw Error(ErrorCode::kShapeMismatch,
                "energy and diffuseness grids differ in shape");
  }
  RealGrid m(energy.frames(), energy.bins());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const bool keep = energy.data()[i] > config.energy_threshold &&
                      diffuseness.data()[i] < config.diffuseness_threshold;
    m.data()[i] = keep ? 1.0 : 0.0;
  }
  return m;
}

RealGrid Weights(const RealGrid& mask, const RealGrid& energy,
                 const RealGrid& diffuseness) {
  if (!mask.SameShape(energy) || !mask.SameShape(diffuseness)) {
    throw Error(ErrorCode::kShapeMismatch, "weight inputs differ in shape");
  }
  RealGrid w(mask.frames(), mask.bins());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w.data()[i] = mask.data()[i] * energy.data()[i] * (1.0 - diffuseness.data()[i]);
  }
  return w;
}

ScBreakdown ScLoss(const FoaSpectrum& input, const FoaSpectrum& recon,
                   const ScConfig& config) {
  config.Validate();
  CheckSameShape(input, recon);
  InputTerms terms = AnalyzeInput(input, config);

  ScBreakdown out;
  out.alignment = Alignment(terms.field.intensity, Intensity(recon), config.epsilon);
  out.mask = std::move(terms.mask);
  out.weights = std::move(terms.weights);
  out.contribution = RealGrid(input.frames(), input.bins());
  const double norm = 1.0 / static_cast<double>(input.frames() * input.bins());
  double total = 0.0;
  for (std::size_t i = 0; i < out.contribution.size(); ++i) {
    const double c = out.weights.data()[i] * (1.0 - out.alignment.data()[i]) * norm;
    out.contribution.data()[i] = c;
    total += c;
  }
  out.loss = total;
  return out;
}

ScGradient ScLossGradient(const FoaSpectrum& input, const FoaSpectrum& recon,
                          const ScConfig& config) {
  config.Validate();
  CheckSameShape(input, recon);
  const InputTerms terms = AnalyzeInput(input, config);
  const std::size_t frames = input.frames();
  const std::size_t bins = input.bins();
  const double norm = 1.0 / static_cast<double>(frames * bins);

  ScGradient out;
  for (auto& g : out.spectral) g = ComplexGrid(frames, bins);
  double total = 0.0;
  for (std::size_t i = 0; i < frames * bins; ++i) {
    const double w = terms.weights.data()[i];
    if (w == 0.0) continue;
    const Complex rw = recon.w().data()[i];
    const std::array<Complex, 3> v = {recon.x().data()[i], recon.y().data()[i],
                                      recon.z().data()[i]};
    const Vec3& a = terms.field.intensity.data()[i];
    const Vec3 b = BinIntensity(rw, v[0], v[1], v[2]);
    const double na = Norm(a);
    const double nb = Norm(b);
    const double denom = na * nb + config.epsilon;
    if (denom <= 0.0) {
      total += w * norm;
      continue;
    }
    const double dot = Dot(a, b);
    total += w * (1.0 - BinAlignment(a, b, config.epsilon)) * norm;

    // ds/db = a / denom - dot * |a| * b / (|b| denom^2); the second term
    // vanishes as |b| -> 0.
    const double radial = nb > 0.0 ? dot * na / (nb * denom * denom) : 0.0;
    Vec3 g;
    for (int j = 0; j < 3; ++j) {
      g[j] = -w * norm * (a[j] / denom - radial * b[j]);
    }
    // I_j = Re(W) Re(v_j) + Im(W) Im(v_j).
    Complex dw(0.0, 0.0);
    for (int j = 0; j < 3; ++j) dw += g[j] * v[j];
    out.spectral[kChannelW].data()[i] = dw;
    out.spectral[kChannelX].data()[i] = g[0] * rw;
    out.spectral[kChannelY].data()[i] = g[1] * rw;
    out.spectral[kChannelZ].data()[i] = g[2] * rw;
  }
  out.loss = total;
  return out;
}

std::array<std::vector<double>, kNumFoaChannels> ScLossTimeGradient(
    const FoaSpectrum& input, const FoaSpectrum& recon, const ScConfig& config) {
  const ScGradient grad = ScLossGradient(input, recon, config);
  std::array<std::vector<double>, kNumFoaChannels> out;
  for (int c = 0; c < kNumFoaChannels; ++c) {
    out[c] = StftAdjoint(grad.spectral[c], recon.params, recon.signal_length);
  }
  return out;
}

void LossWeights::Validate() const {
  for (double v : {quantization, mel, adversarial, feature, spatial}) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "loss weights must be finite and non-negative");
    }
  }
}

double GeneratorTotal(const LossComponents& c, const LossWeights& weights) {
  weights.Validate();
  return weights.quantization * c.quantization + weights.mel * c.mel +
         weights.adversarial * c.adversarial + weights.feature * c.feature +
         weights.spatial * c.spatial;
}

double HingeDiscriminatorLoss(std::span<const std::vector<double>> real_scores,
                              std::span<const std::vector<double>> fake_scores) {
  if (real_scores.empty() || real_scores.size() != fake_scores.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "need the same number (>= 1) of real and fake score arrays");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < real_scores.size(); ++k) {
    const auto& real = real_scores[k];
    const auto& fake = fake_scores[k];
    if (real.empty() || real.size() != fake.size()) {
      throw Error(ErrorCode::kShapeMismatch,
                  "discriminator output " + std::to_string(k) +
                      " has mismatched or empty score arrays");
    }
    double real_term = 0.0;
    double fake_term = 0.0;
    for (std::size_t i = 0; i < real.size(); ++i) {
      real_term += std::max(0.0, 1.0 - real[i]);
      fake_term += std::max(0.0, 1.0 + fake[i]);
    }
    total += (real_term + fake_term) / static_cast<double>(real.size());
  }
  return total / static_cast<double>(real_scores.size());
}

}  // namespace sfoa
