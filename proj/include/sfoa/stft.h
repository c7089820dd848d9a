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

#ifndef SFOA_STFT_H_
#define SFOA_STFT_H_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sfoa/foa_signal.h"
#include "sfoa/grid.h"

namespace sfoa {

// Hann-windowed STFT configuration. The periodic Hann window of
// `win_length` samples sits in the middle of the `fft_size` frame. With
// `center` set, the signal is zero-padded by fft_size/2 on both sides so
// frame t is centered on sample t * hop.
class StftParams {
 public:
  // Invertible parameters; throws kNotCola if the window does not overlap-add
  // to a constant at this hop, kInvalidArgument on inconsistent sizes.
  static StftParams Create(int fft_size, int hop, int win_length,
                           bool center = true);
  // Forward-only parameters (e.g. metric resolutions whose hop does not divide
  // the window). Istft rejects these.
  static StftParams AnalysisOnly(int fft_size, int hop, int win_length,
                                 bool center = true);
  // Hann 1024 / hop 256, centered.
  static StftParams Default();

  int fft_size() const { return fft_size_; }
  int hop() const { return hop_; }
  int win_length() const { return win_length_; }
  bool center() const { return center_; }
  bool invertible() const { return invertible_; }
  std::size_t num_bins() const { return static_cast<std::size_t>(fft_size_ / 2 + 1); }
  std::size_t NumFrames(std::size_t signal_length) const;
  // fft_size samples, zero outside the centered Hann segment.
  std::span<const double> window() const { return window_; }

 private:
  StftParams(int fft_size, int hop, int win_length, bool center);

  int fft_size_ = 0;
  int hop_ = 0;
  int win_length_ = 0;
  bool center_ = true;
  bool invertible_ = false;
  std::vector<double> window_;
};

// Periodic Hann window.
std::vector<double> HannWindow(int length);

ComplexGrid Stft(std::span<const double> signal, const StftParams& params);

// Weighted overlap-add inverse. `length` defaults to the longest signal that
// produces the grid's frame count. Throws kShapeMismatch when the grid does
// not match the parameters, kNotCola for analysis-only parameters.
std::vector<double> Istft(const ComplexGrid& grid, const StftParams& params,
                          std::optional<std::size_t> length = std::nullopt);

// Transpose of Stft viewed as a real-linear map from samples to the real and
// imaginary parts of the grid. `grad` holds d/dRe + i d/dIm per bin; the
// result is the gradient with respect to each input sample.
std::vector<double> StftAdjoint(const ComplexGrid& grad, const StftParams& params,
                                std::size_t length);

// Per-channel spectra of an FOA signal, channels in ACN order.
struct FoaSpectrum {
  StftParams params = StftParams::Default();
  int sample_rate = kDefaultSampleRate;
  std::size_t signal_length = 0;
  std::array<ComplexGrid, kNumFoaChannels> channels;

  std::size_t frames() const { return channels[0].frames(); }
  std::size_t bins() const { return channels[0].bins(); }
  const ComplexGrid& w() const { return channels[kChannelW]; }
  const ComplexGrid& x() const { return channels[kChannelX]; }
  const ComplexGrid& y() const { return channels[kChannelY]; }
  const ComplexGrid& z() const { return channels[kChannelZ]; }
};

FoaSpectrum ComputeSpectrum(const FoaSignal& signal,
                            const StftParams& params = StftParams::Default());
FoaSignal Synthesize(const FoaSpectrum& spectrum);

// Builds a spectrum directly from grids. Throws kShapeMismatch unless all
// four share a shape, kNonFinite on NaN/Inf entries.
FoaSpectrum MakeSpectrum(std::array<ComplexGrid, kNumFoaChannels> channels,
                         const StftParams& params = StftParams::Default(),
                         int sample_rate = kDefaultSampleRate);

// HTK-scale triangular filterbank spanning 0 Hz to Nyquist, one row per band
// over the fft_size/2+1 bins. Throws kInvalidArgument if n_mels exceeds the
// bin count.
RealGrid MelFilterbank(int sample_rate, int n_mels, const StftParams& params);

// Power mel spectrogram: frames x n_mels.
RealGrid MelSpectrogram(std::span<const double> signal, int sample_rate,
                        int n_mels, const StftParams& params);

double HzToMel(double hz);
double MelToHz(double mel);

}  // namespace sfoa

#endif  // SFOA_STFT_H_
