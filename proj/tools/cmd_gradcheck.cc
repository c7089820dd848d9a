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

// Checks the analytic SC-loss gradient against central differences of the
// forward loss on seeded random spectra.

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "cli.h"
#include "sfoa/error.h"

namespace sfoa::cli {
namespace {

struct GradCheckFlags {
  int cases = 100;
  int frames = 6;
  int bins = 9;
  double step = 1e-6;
  double tolerance = 1e-4;
  bool fault_sign_flip = false;
  ScFlags sc;
};

FoaSpectrum RandomSpectrum(std::size_t frames, std::size_t bins, const StftParams& params,
                           std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::array<ComplexGrid, kNumFoaChannels> ch;
  for (auto& g : ch) {
    g = ComplexGrid(frames, bins);
    for (auto& v : g.data()) v = Complex(normal(rng), normal(rng));
  }
  return MakeSpectrum(std::move(ch), params);
}

// Loss difference summed per bin, so untouched bins cancel exactly.
double Delta(const ScBreakdown& plus, const ScBreakdown& minus) {
  double d = 0.0;
  for (std::size_t i = 0; i < plus.contribution.size(); ++i) {
    d += plus.contribution.data()[i] - minus.contribution.data()[i];
  }
  return d;
}

int RunGradCheck(const GradCheckFlags& f, const Globals& g) {
  const ScConfig config = f.sc.Config();
  if (f.cases < 1 || f.frames < 1 || f.bins < 2) {
    throw Error(ErrorCode::kInvalidArgument, "need cases >= 1, frames >= 1 and bins >= 2");
  }
  if (!(f.step > 0.0) || !(f.tolerance > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "step and tolerance must be positive");
  }
  const int fft = 2 * (f.bins - 1);
  const StftParams params = StftParams::AnalysisOnly(fft, std::max(1, fft / 4), fft);

  double worst = 0.0;
  std::size_t checked = 0, active = 0;
  for (int c = 0; c < f.cases; ++c) {
    std::mt19937_64 rng(g.seed * 1000003 + static_cast<std::uint64_t>(c));
    const FoaSpectrum input = RandomSpectrum(f.frames, f.bins, params, rng);
    FoaSpectrum recon = RandomSpectrum(f.frames, f.bins, params, rng);
    ScGradient grad = ScLossGradient(input, recon, config);
    if (f.fault_sign_flip) {
      for (auto& ch : grad.spectral) {
        for (auto& v : ch.data()) v = -v;
      }
    }
    double scale = 0.0;
    for (const auto& ch : grad.spectral) {
      for (const auto& v : ch.data()) scale = std::max(scale, std::abs(v));
    }
    const ScBreakdown base = ScLoss(input, recon, config);
    for (double m : base.mask.data()) active += m > 0.0;

    for (std::size_t i = 0; i < recon.w().size(); ++i) {
      double magnitude = 0.0;
      for (const auto& ch : recon.channels) magnitude = std::max(magnitude, std::abs(ch.data()[i]));
      const double h = f.step * magnitude;
      if (h == 0.0) continue;
      for (int ch = 0; ch < kNumFoaChannels; ++ch) {
        for (bool imag : {false, true}) {
          Complex& v = recon.channels[ch].data()[i];
          const Complex original = v;
          const Complex dv = imag ? Complex(0.0, h) : Complex(h, 0.0);
          v = original + dv;
          const ScBreakdown plus = ScLoss(input, recon, config);
          v = original - dv;
          const ScBreakdown minus = ScLoss(input, recon, config);
          v = original;
          const double numeric = Delta(plus, minus) / (2.0 * h);
          const Complex a = grad.spectral[ch].data()[i];
          const double analytic = imag ? a.imag() : a.real();
          const double denom =
              std::max({std::abs(analytic), std::abs(numeric), 1e-6 * scale});
          if (denom > 0.0) worst = std::max(worst, std::abs(analytic - numeric) / denom);
          ++checked;
        }
      }
    }
  }

  const bool pass = worst < f.tolerance;
  fmt::print("seed: {}\n", g.seed);
  fmt::print("cases: {}\nframes: {}\nbins: {}\n", f.cases, f.frames, f.bins);
  fmt::print("components_checked: {}\n", checked);
  fmt::print("active_bins: {}\n", active);
  fmt::print("max_relative_error: {:.3e}\n", worst);
  fmt::print("tolerance: {:.1e}\n", f.tolerance);
  fmt::print("result: {}\n", pass ? "PASS" : "FAIL");
  return pass ? kExitOk : kExitCheckFailed;
}

}  // namespace

void AddGradCheck(CLI::App& root, const Globals& globals, std::vector<Command>& out) {
  auto flags = std::make_shared<GradCheckFlags>();
  CLI::App* app = root.add_subcommand(
      "gradcheck", "Compare the analytic SC-loss gradient with central finite differences");
  app->add_option("--cases", flags->cases, "Random input/reconstruction pairs")
      ->capture_default_str();
  app->add_option("--frames", flags->frames, "Frames per spectrum")->capture_default_str();
  app->add_option("--bins", flags->bins, "Frequency bins per spectrum (>= 2)")
      ->capture_default_str();
  app->add_option("--step", flags->step, "Difference step relative to the bin's magnitude")
      ->capture_default_str();
  app->add_option("--tolerance", flags->tolerance, "Maximum allowed relative error")
      ->capture_default_str();
  app->add_flag("--fault-sign-flip", flags->fault_sign_flip,
                "Test hook: negate the analytic gradient so the check must fail");
  flags->sc.Add(app);
  out.push_back({app, [flags, &globals] { return RunGradCheck(*flags, globals); }});
}

}  // namespace sfoa::cli
