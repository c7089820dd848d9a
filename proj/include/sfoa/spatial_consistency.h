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

#ifndef SFOA_SPATIAL_CONSISTENCY_H_
#define SFOA_SPATIAL_CONSISTENCY_H_

#include <array>
#include <span>
#include <vector>

#include "sfoa/dirac.h"
#include "sfoa/grid.h"
#include "sfoa/stft.h"

namespace sfoa {

// Spatial consistency (SC) loss between an input FOA spectrum and its
// reconstruction:
//
//   s = (I_in . I_rec) / (|I_in| |I_rec| + eps)
//   m = [E_in > tau_E] [D_in < tau_D]
//   w = m E_in (1 - D_in)
//   L = (1 / TK) sum_{t,k} w (1 - s)
//
// Mask and weights come from the input only, and masked-out bins still count
// in the T*K normalizer.
struct ScConfig {
  double energy_threshold = 1e-6;
  double diffuseness_threshold = 0.95;
  // eps = 0 is accepted; a bin whose denominator vanishes gets s = 0.
  double epsilon = 1e-8;
  int window = kDefaultDiffusenessWindow;

  // Throws kInvalidArgument when a field is out of range.
  void Validate() const;
};

struct ScBreakdown {
  RealGrid alignment;     // s in [-1, 1]
  RealGrid mask;          // 0 or 1
  RealGrid weights;       // w
  RealGrid contribution;  // w (1 - s) / (T K)
  double loss = 0.0;
};

RealGrid Alignment(const VectorGrid& input, const VectorGrid& recon,
                   double epsilon);
RealGrid Mask(const RealGrid& energy, const RealGrid& diffuseness,
              const ScConfig& config);
RealGrid Weights(const RealGrid& mask, const RealGrid& energy,
                 const RealGrid& diffuseness);

ScBreakdown ScLoss(const FoaSpectrum& input, const FoaSpectrum& recon,
                   const ScConfig& config = {});

// dL/dRe + i dL/dIm for every bin of the reconstruction, ACN channel order.
struct ScGradient {
  double loss = 0.0;
  std::array<ComplexGrid, kNumFoaChannels> spectral;
};

ScGradient ScLossGradient(const FoaSpectrum& input, const FoaSpectrum& recon,
                          const ScConfig& config = {});

// Chains the spectral gradient through the STFT to the reconstruction's
// time-domain samples (the recon spectrum must come from ComputeSpectrum).
std::array<std::vector<double>, kNumFoaChannels> ScLossTimeGradient(
    const FoaSpectrum& input, const FoaSpectrum& recon,
    const ScConfig& config = {});

struct LossWeights {
  // The adversarial and feature-matching weights have no published values.
  LossWeights(double adversarial, double feature)
      : adversarial(adversarial), feature(feature) {}

  double quantization = 1000.0;
  double mel = 45.0;
  double adversarial;
  double feature;
  double spatial = 1.0;

  void Validate() const;
};

struct LossComponents {
  double quantization = 0.0;
  double mel = 0.0;
  double adversarial = 0.0;
  double feature = 0.0;
  double spatial = 0.0;
};

double GeneratorTotal(const LossComponents& components,
                      const LossWeights& weights);

// Hinge loss averaged over K discriminator outputs; each output's hinge terms
// are averaged over its scores.
double HingeDiscriminatorLoss(std::span<const std::vector<double>> real_scores,
                              std::span<const std::vector<double>> fake_scores);

}  // namespace sfoa

#endif  // SFOA_SPATIAL_CONSISTENCY_H_
