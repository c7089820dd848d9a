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

#include "sfoa/stft.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fft.h"
#include "sfoa/error.h"

namespace sfoa {

namespace {

std::size_t Padding(const StftParams& p) {
  return p.center() ? static_cast<std::size_t>(p.fft_size() / 2) : 0;
}

bool OverlapAddsToConstant(std::span<const double> window, int hop) {
  const int n = static_cast<int>(window.size());
  double lo = 0.0;
  double hi = 0.0;
  for (int phase = 0; phase < hop; ++phase) {
    double sum = 0.0;
    for (int j = phase; j < n; j += hop) sum += window[j];
    if (phase == 0) {
      lo = hi = sum;
    } else {
      lo = std::min(lo, sum);
      hi = std::max(hi, sum);
    }
  }
  return lo > 0.0 && (hi - lo) <= 1e-9 * hi;
}

}  // namespace

std::vector<double> HannWindow(int length) {
  std::vector<double> w(length);
  for (int n = 0; n < length; ++n) {
    w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / length);
  }
  return w;
}

StftParams::StftParams(int fft_size, int hop, int win_length, bool center)
    : fft_size_(fft_size), hop_(hop), win_length_(win_length), center_(center) {
  if (fft_size < 2 || hop < 1 || win_length < 1 || win_length > fft_size ||
      hop > win_length) {
    throw Error(ErrorCode::kInvalidArgument,
                "invalid STFT sizes: fft=" + std::to_string(fft_size) +
                    " hop=" + std::to_string(hop) +
                    " win=" + std::to_string(win_length) +
                    " (need 1 <= hop <= win <= fft)");
  }
  window_.assign(fft_size, 0.0);
  const auto hann = HannWindow(win_length);
  const int offset = (fft_size - win_length) / 2;
  std::copy(hann.begin(), hann.end(), window_.begin() + offset);
}

StftParams StftParams::Create(int fft_size, int hop, int win_length,
                              bool center) {
  StftParams p(fft_size, hop, win_length, center);
  if (!OverlapAddsToConstant(p.window_, hop)) {
    throw Error(ErrorCode::kNotCola,
                "Hann window of " + std::to_string(win_length) +
                    " samples does not overlap-add to a constant at hop " +
                    std::to_string(hop));
  }
  p.invertible_ = true;
  return p;
}

StftParams StftParams::AnalysisOnly(int fft_size, int hop, int win_length,
                                    bool center) {
  return StftParams(fft_size, hop, win_length, center);
}

StftParams StftParams::Default() { return Create(1024, 256, 1024, true); }

std::size_t StftParams::NumFrames(std::size_t signal_length) const {
  const std::size_t padded = signal_length + 2 * Padding(*this);
  const auto fft = static_cast<std::size_t>(fft_size_);
  if (padded <= fft) return 1;
  const auto h = static_cast<std::size_t>(hop_);
  return 1 + (padded - fft + h - 1) / h;
}

ComplexGrid Stft(std::span<const double> signal, const StftParams& params) {
  const std::size_t frames = params.NumFrames(signal.size());
  const std::size_t fft = static_cast<std::size_t>(params.fft_size());
  const std::size_t pad = Padding(params);
  const auto window = params.window();
  auto& engine = internal::RealFft::ForSize(params.fft_size());

  ComplexGrid grid(frames, params.num_bins());
  std::vector<double> buffer(fft);
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t start = t * static_cast<std::size_t>(params.hop());
    for (std::size_t j = 0; j < fft; ++j) {
      const std::size_t p = start + j;
      const bool inside = p >= pad && p - pad < signal.size();
      buffer[j] = inside ? window[j] * signal[p - pad] : 0.0;
    }
    engine.Forward(buffer, grid.row(t));
  }
  return grid;
}

std::vector<double> Istft(const ComplexGrid& grid, const StftParams& params,
                          std::optional<std::size_t> length) {
  if (!params.invertible()) {
    throw Error(ErrorCode::kNotCola,
                "STFT parameters were created for analysis only");
  }
  const std::size_t frames = grid.frames();
  const std::size_t fft = static_cast<std::size_t>(params.fft_size());
  const std::size_t hop = static_cast<std::size_t>(params.hop());
  const std::size_t pad = Padding(params);
  if (grid.bins() != params.num_bins() || frames == 0) {
    throw Error(ErrorCode::kShapeMismatch,
                "grid has " + std::to_string(grid.bins()) +
                    " bins; parameters expect " +
                    std::to_string(params.num_bins()));
  }
  const std::size_t padded_length = (frames - 1) * hop + fft;
  const std::size_t out_length = length.value_or(padded_length - 2 * pad);
  if (params.NumFrames(out_length) != frames) {
    throw Error(ErrorCode::kShapeMismatch,
                "grid has " + std::to_string(frames) + " frames; a signal of " +
                    std::to_string(out_length) + " samples needs " +
                    std::to_string(params.NumFrames(out_length)));
  }

  const auto window = params.window();
  auto& engine = internal::RealFft::ForSize(params.fft_size());
  std::vector<double> accum(padded_length, 0.0);
  std::vector<double> norm(padded_length, 0.0);
  std::vector<double> buffer(fft);
  const double scale = 1.0 / static_cast<double>(fft);
  for (std::size_t t = 0; t < frames; ++t) {
    engine.Inverse(grid.row(t), buffer);
    const std::size_t start = t * hop;
    for (std::size_t j = 0; j < fft; ++j) {
      accum[start + j] += window[j] * buffer[j] * scale;
      norm[start + j] += window[j] * window[j];
    }
  }
  std::vector<double> out(out_length, 0.0);
  for (std::size_t n = 0; n < out_length && n + pad < padded_length; ++n) {
    const double d = norm[n + pad];
    out[n] = d > 1e-12 ? accum[n + pad] / d : 0.0;
  }
  return out;
}

std::vector<double> StftAdjoint(const ComplexGrid& grad, const StftParams& params,
                                std::size_t length) {
  if (grad.bins() != params.num_bins() ||
      grad.frames() != params.NumFrames(length)) {
    throw Error(ErrorCode::kShapeMismatch,
                "gradient grid does not match the STFT of a " +
                    std::to_string(length) + "-sample signal");
  }
  const std::size_t fft = static_cast<std::size_t>(params.fft_size());
  const std::size_t hop = static_cast<std::size_t>(params.hop());
  const std::size_t pad = Padding(params);
  const auto window = params.window();
  auto& engine = internal::RealFft::ForSize(params.fft_size());

  // Re(sum_k g_k e^{+i theta}) over the half spectrum equals the inverse real
  // FFT of g with the doubly-counted interior bins halved.
  std::vector<Complex> half(params.num_bins());
  std::vector<double> buffer(fft);
  std::vector<double> out(length, 0.0);
  const std::size_t last_interior = (fft % 2 == 0) ? fft / 2 : fft / 2 + 1;
  for (std::size_t t = 0; t < grad.frames(); ++t) {
    const auto row = grad.row(t);
    for (std::size_t k = 0; k < half.size(); ++k) {
      half[k] = (k == 0 || k >= last_interior) ? row[k] : 0.5 * row[k];
    }
    engine.Inverse(half, buffer);
    const std::size_t start = t * hop;
    for (std::size_t j = 0; j < fft; ++j) {
      const std::size_t p = start + j;
      if (p >= pad && p - pad < length) out[p - pad] += window[j] * buffer[j];
    }
  }
  return out;
}

FoaSpectrum ComputeSpectrum(const FoaSignal& signal, const StftParams& params) {
  FoaSpectrum spec;
  spec.params = params;
  spec.sample_rate = signal.sample_rate();
  spec.signal_length = signal.length();
  for (int c = 0; c < kNumFoaChannels; ++c) {
    spec.channels[c] = Stft(signal.channel(c), params);
  }
  return spec;
}

FoaSignal Synthesize(const FoaSpectrum& spectrum) {
  FoaSignal::Channels channels;
  for (int c = 0; c < kNumFoaChannels; ++c) {
    channels[c] = Istft(spectrum.channels[c], spectrum.params,
                        spectrum.signal_length);
  }
  return FoaSignal(spectrum.sample_rate, std::move(channels));
}

FoaSpectrum MakeSpectrum(std::array<ComplexGrid, kNumFoaChannels> channels,
                         const StftParams& params, int sample_rate) {
  for (const auto& g : channels) {
    if (!g.SameShape(channels[0])) {
      throw Error(ErrorCode::kShapeMismatch,
                  "FOA spectrum channels must share a shape");
    }
    for (const Complex& v : g.data()) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw Error(ErrorCode::kNonFinite, "spectrum has a non-finite bin");
      }
    }
  }
  FoaSpectrum spec;
  spec.params = params;
  spec.sample_rate = sample_rate;
  const std::size_t frames = channels[0].frames();
  const std::size_t pad = Padding(params);
  spec.signal_length =
      frames == 0 ? 0
                  : (frames - 1) * static_cast<std::size_t>(params.hop()) +
                        static_cast<std::size_t>(params.fft_size()) -
                        std::min<std::size_t>(2 * pad, params.fft_size());
  spec.channels = std::move(channels);
  return spec;
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

RealGrid MelFilterbank(int sample_rate, int n_mels, const StftParams& params) {
  const std::size_t bins = params.num_bins();
  if (n_mels < 1 || static_cast<std::size_t>(n_mels) > bins) {
    throw Error(ErrorCode::kInvalidArgument,
                "n_mels must be in [1, " + std::to_string(bins) + "], got " +
                    std::to_string(n_mels));
  }
  const double nyquist = sample_rate / 2.0;
  const double top = HzToMel(nyquist);
  std::vector<double> edges(n_mels + 2);
  for (int i = 0; i < n_mels + 2; ++i) {
    edges[i] = MelToHz(top * i / (n_mels + 1));
  }
  const double bin_hz = static_cast<double>(sample_rate) / params.fft_size();

  RealGrid fb(static_cast<std::size_t>(n_mels), bins, 0.0);
  for (int m = 0; m < n_mels; ++m) {
    const double lo = edges[m];
    const double mid = edges[m + 1];
    const double hi = edges[m + 2];
    double row_sum = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = k * bin_hz;
      const double rise = (f - lo) / (mid - lo);
      const double fall = (hi - f) / (hi - mid);
      const double v = std::max(0.0, std::min(rise, fall));
      fb(m, k) = v;
      row_sum += v;
    }
    // Narrow low bands can fall between bin centres; give them the nearest bin.
    if (row_sum <= 0.0) {
      const auto k = static_cast<std::size_t>(std::lround(mid / bin_hz));
      fb(m, std::min(k, bins - 1)) = 1.0;
    }
  }
  return fb;
}

RealGrid MelSpectrogram(std::span<const double> signal, int sample_rate,
                        int n_mels, const StftParams& params) {
  const RealGrid fb = MelFilterbank(sample_rate, n_mels, params);
  const ComplexGrid spec = Stft(signal, params);
  RealGrid mel(spec.frames(), static_cast<std::size_t>(n_mels), 0.0);
  std::vector<double> power(spec.bins());
  for (std::size_t t = 0; t < spec.frames(); ++t) {
    const auto row = spec.row(t);
    for (std::size_t k = 0; k < row.size(); ++k) power[k] = std::norm(row[k]);
    for (std::size_t m = 0; m < mel.bins(); ++m) {
      const auto weights = fb.row(m);
      double acc = 0.0;
      for (std::size_t k = 0; k < power.size(); ++k) acc += weights[k] * power[k];
      mel(t, m) = acc;
    }
  }
  return mel;
}

}  // namespace sfoa
