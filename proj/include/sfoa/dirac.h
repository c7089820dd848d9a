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

#ifndef SFOA_DIRAC_H_
#define SFOA_DIRAC_H_

#include <string>

#include "sfoa/grid.h"
#include "sfoa/stft.h"

namespace sfoa {

inline constexpr int kDefaultDiffusenessWindow = 5;
inline constexpr double kDiffusenessEpsilon = 1e-12;

// Per-bin DirAC parameters of one FOA spectrum.
//
// With SN3D channels a plane wave has |I| == E exactly, so diffuseness is a
// plain ratio with no physical constants involved.
struct DiracField {
  RealGrid energy;          // E = (|W|^2 + |X|^2 + |Y|^2 + |Z|^2) / 2
  VectorGrid intensity;     // I = Re{conj(W) [X, Y, Z]}
  RealGrid diffuseness;     // in [0, 1]
  // |<I>|, the L-frame averaged intensity magnitude (visualization map).
  RealGrid averaged_intensity_magnitude;
  int window = kDefaultDiffusenessWindow;
};

VectorGrid Intensity(const FoaSpectrum& spec);
RealGrid Energy(const FoaSpectrum& spec);

// Bin-wise versions, exposed for gradient code and tests.
inline Vec3 BinIntensity(Complex w, Complex x, Complex y, Complex z) {
  const Complex cw = std::conj(w);
  return {(cw * x).real(), (cw * y).real(), (cw * z).real()};
}
inline double BinEnergy(Complex w, Complex x, Complex y, Complex z) {
  return 0.5 * (std::norm(w) + std::norm(x) + std::norm(y) + std::norm(z));
}

// Centered moving average over `window` frames (odd, >= 1); frames near the
// edges average over the frames that exist.
RealGrid SmoothFrames(const RealGrid& grid, int window);
VectorGrid SmoothFrames(const VectorGrid& grid, int window);

// D = 1 - |<I>| / (<E> + 1e-12), clamped to [0, 1]. Throws
// kInvalidArgument for an even or non-positive window.
RealGrid Diffuseness(const RealGrid& energy, const VectorGrid& intensity,
                     int window);

DiracField Analyze(const FoaSpectrum& spec,
                   int window = kDefaultDiffusenessWindow);

// CSV with one row per frame and one column per bin.
std::string GridToCsv(const RealGrid& grid, int precision = 9);

}  // namespace sfoa

#endif  // SFOA_DIRAC_H_
