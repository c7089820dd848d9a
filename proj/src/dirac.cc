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

#include "sfoa/dirac.h"

#include <algorithm>
#include <cstdio>

#include "sfoa/error.h"

namespace sfoa {

namespace {

void CheckWindow(int window) {
  if (window < 1 || window % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "diffuseness window must be a positive odd frame count, got " +
                    std::to_string(window));
  }
}

template <typename T, typename Add, typename Scale>
Grid<T> Smooth(const Grid<T>& grid, int window, Add add, Scale scale) {
  CheckWindow(window);
  if (window == 1) return grid;
  const auto half = static_cast<std::ptrdiff_t>(window / 2);
  const auto frames = static_cast<std::ptrdiff_t>(grid.frames());
  Grid<T> out(grid.frames(), grid.bins());
  for (std::ptrdiff_t t = 0; t < frames; ++t) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, t - half);
    const std::ptrdiff_t hi = std::min(frames - 1, t + half);
    const double inv = 1.0 / static_cast<double>(hi - lo + 1);
    for (std::size_t k = 0; k < grid.bins(); ++k) {
      T acc{};
      for (std::ptrdiff_t u = lo; u <= hi; ++u) acc = add(acc, grid(u, k));
      out(t, k) = scale(acc, inv);
    }
  }
  return out;
}

}  // namespace

VectorGrid Intensity(const FoaSpectrum& spec) {
  VectorGrid out(spec.frames(), spec.bins());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.data()[i] = BinIntensity(spec.w().data()[i], spec.x().data()[i],
                                 spec.y().data()[i], spec.z().data()[i]);
  }
  return out;
}

RealGrid Energy(const FoaSpectrum& spec) {
  RealGrid out(spec.frames(), spec.bins());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.data()[i] = BinEnergy(spec.w().data()[i], spec.x().data()[i],
                              spec.y().data()[i], spec.z().data()[i]);
  }
  return out;
}

RealGrid SmoothFrames(const RealGrid& grid, int window) {
  return Smooth(
      grid, window, [](double a, double b) { return a + b; },
      [](double a, double s) { return a * s; });
}

VectorGrid SmoothFrames(const VectorGrid& grid, int window) {
  return Smooth(
      grid, window,
      [](const Vec3& a, const Vec3& b) {
        return Vec3{a[0] + b[0], a[1] + b[1], a[2] + b[2]};
      },
      [](const Vec3& a, double s) { return Vec3{a[0] * s, a[1] * s, a[2] * s}; });
}

namespace {

RealGrid DiffusenessFromAverages(const RealGrid& avg_energy,
                                 const VectorGrid& avg_intensity,
                                 RealGrid* avg_magnitude) {
  RealGrid d(avg_energy.frames(), avg_energy.bins());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double magnitude = Norm(avg_intensity.data()[i]);
    if (avg_magnitude) avg_magnitude->data()[i] = magnitude;
    const double ratio = magnitude / (avg_energy.data()[i] + kDiffusenessEpsilon);
    d.data()[i] = std::clamp(1.0 - ratio, 0.0, 1.0);
  }
  return d;
}

}  // namespace

RealGrid Diffuseness(const RealGrid& energy, const VectorGrid& intensity,
                     int window) {
  CheckWindow(window);
  if (!energy.SameShape(intensity)) {
    throw Error(ErrorCode::kShapeMismatch,
                "energy and intensity grids differ in shape");
  }
  return DiffusenessFromAverages(SmoothFrames(energy, window),
                                 SmoothFrames(intensity, window), nullptr);
}

DiracField Analyze(const FoaSpectrum& spec, int window) {
  CheckWindow(window);
  DiracField field;
  field.window = window;
  field.energy = Energy(spec);
  field.intensity = Intensity(spec);
  field.averaged_intensity_magnitude = RealGrid(spec.frames(), spec.bins());
  field.diffuseness = DiffusenessFromAverages(
      SmoothFrames(field.energy, window), SmoothFrames(field.intensity, window),
      &field.averaged_intensity_magnitude);
  return field;
}

std::string GridToCsv(const RealGrid& grid, int precision) {
  std::string out;
  char buf[64];
  for (std::size_t t = 0; t < grid.frames(); ++t) {
    const auto row = grid.row(t);
    for (std::size_t k = 0; k < row.size(); ++k) {
      std::snprintf(buf, sizeof(buf), "%.*g", precision, row[k]);
      if (k) out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace sfoa
