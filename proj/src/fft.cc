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

#include "fft.h"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>

namespace sfoa::internal {

namespace {

// FFTW planning is not thread safe; execution on distinct plans is.
std::mutex& PlannerMutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

RealFft::RealFft(int size) : size_(size) {
  std::lock_guard<std::mutex> lock(PlannerMutex());
  real_ = fftw_alloc_real(size);
  auto* spectrum = fftw_alloc_complex(size / 2 + 1);
  spectrum_ = spectrum;
  forward_ = fftw_plan_dft_r2c_1d(size, real_, spectrum, FFTW_ESTIMATE);
  inverse_ = fftw_plan_dft_c2r_1d(size, spectrum, real_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(PlannerMutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_));
  fftw_free(real_);
  fftw_free(spectrum_);
}

RealFft& RealFft::ForSize(int size) {
  thread_local std::map<int, std::unique_ptr<RealFft>> cache;
  auto& slot = cache[size];
  if (!slot) slot = std::make_unique<RealFft>(size);
  return *slot;
}

void RealFft::Forward(std::span<const double> in, std::span<Complex> out) {
  std::copy(in.begin(), in.end(), real_);
  fftw_execute(static_cast<fftw_plan>(forward_));
  const auto* spec = static_cast<const fftw_complex*>(spectrum_);
  for (int k = 0; k <= size_ / 2; ++k) out[k] = Complex(spec[k][0], spec[k][1]);
}

void RealFft::Inverse(std::span<const Complex> in, std::span<double> out) {
  auto* spec = static_cast<fftw_complex*>(spectrum_);
  for (int k = 0; k <= size_ / 2; ++k) {
    spec[k][0] = in[k].real();
    spec[k][1] = in[k].imag();
  }
  spec[0][1] = 0.0;
  if (size_ % 2 == 0) spec[size_ / 2][1] = 0.0;
  // c2r destroys its input; spectrum_ is scratch so that is fine.
  fftw_execute(static_cast<fftw_plan>(inverse_));
  std::copy(real_, real_ + size_, out.begin());
}

}  // namespace sfoa::internal
