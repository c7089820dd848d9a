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

#ifndef SFOA_SRC_FFT_H_
#define SFOA_SRC_FFT_H_

#include <span>

#include "sfoa/grid.h"

namespace sfoa::internal {

// Real-input FFT of a fixed size backed by FFTW. Instances are not shared
// between threads; use ForSize() for a per-thread cached instance.
class RealFft {
 public:
  explicit RealFft(int size);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  static RealFft& ForSize(int size);

  int size() const { return size_; }

  // out[k] = sum_n in[n] exp(-2 pi i k n / N), k = 0..N/2.
  void Forward(std::span<const double> in, std::span<Complex> out);
  // Unnormalized inverse of a Hermitian half spectrum. Imaginary parts of the
  // DC and Nyquist bins are ignored.
  void Inverse(std::span<const Complex> in, std::span<double> out);

 private:
  int size_;
  double* real_;
  void* spectrum_;
  void* forward_;
  void* inverse_;
};

}  // namespace sfoa::internal

#endif  // SFOA_SRC_FFT_H_
