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

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>

#include <json.hpp>

#include "cli.h"
#include "sfoa/dirac.h"
#include "sfoa/error.h"
#include "sfoa/eval_metrics.h"
#include "sfoa/wav_io.h"

namespace sfoa::cli {
namespace {

struct AnalyzeFlags {
  std::string in;
  std::string out;
  std::string intensity_map;
  std::string json;
  StftFlags stft;
  ScFlags sc;
};

// Printed vectors should not show "-0.000000".
double Tidy(double v) { return std::abs(v) < 5e-7 ? 0.0 : v; }

double Median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + v.size() / 2;
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

int RunAnalyze(const AnalyzeFlags& f, const Globals& g) {
  const ScConfig config = f.sc.Config();
  const StftParams params = f.stft.Params();
  const FoaSignal signal = ReadFoaWav(f.in);
  const FoaSpectrum spec = ComputeSpectrum(signal, params);
  const DiracField field = Analyze(spec, config.window);
  const std::size_t frames = field.energy.frames(), bins = field.energy.bins();

  // Per-frame summary: total energy, mean diffuseness, summed intensity.
  std::string csv = "frame,time_s,energy,diffuseness,intensity_x,intensity_y,intensity_z\n";
  for (std::size_t t = 0; t < frames; ++t) {
    double e = 0.0, d = 0.0;
    Vec3 i = {0, 0, 0};
    for (std::size_t k = 0; k < bins; ++k) {
      e += field.energy(t, k);
      d += field.diffuseness(t, k);
      for (int j = 0; j < 3; ++j) i[j] += field.intensity(t, k)[j];
    }
    csv += fmt::format("{},{:.6f},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g}\n", t,
                       static_cast<double>(t * params.hop()) / signal.sample_rate(), e,
                       d / static_cast<double>(bins), i[0], i[1], i[2]);
  }
  WriteText(f.out, csv);
  if (!f.intensity_map.empty()) WriteText(f.intensity_map, GridToCsv(field.averaged_intensity_magnitude));

  std::optional<Direction> doa;
  try {
    doa = EstimateDoa(signal, config, params);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoDirectionalEnergy) throw;
  }
  double mean_energy = 0.0;
  for (double e : field.energy.data()) mean_energy += e;
  mean_energy /= static_cast<double>(field.energy.size());
  const double median_d = Median(field.diffuseness.data());

  fmt::print("seed: {}\n", g.seed);
  fmt::print("frames: {}\nbins: {}\n", frames, bins);
  fmt::print("mean_energy: {:.9g}\n", mean_energy);
  fmt::print("median_diffuseness: {:.6f}\n", median_d);
  nlohmann::json summary = {{"seed", g.seed},
                            {"input", f.in},
                            {"frames", frames},
                            {"bins", bins},
                            {"window", config.window},
                            {"mean_energy", mean_energy},
                            {"median_diffuseness", median_d},
                            {"dominant_direction", nullptr}};
  if (doa) {
    const Vec3 u = doa->UnitVector();
    fmt::print("dominant_direction: {:.6f} {:.6f} {:.6f}\n", Tidy(u[0]), Tidy(u[1]), Tidy(u[2]));
    fmt::print("azimuth_deg: {:.6f}\nelevation_deg: {:.6f}\n", Tidy(doa->azimuth_deg()),
               Tidy(doa->elevation_deg()));
    summary["dominant_direction"] = {{"x", u[0]},
                                     {"y", u[1]},
                                     {"z", u[2]},
                                     {"azimuth_deg", doa->azimuth_deg()},
                                     {"elevation_deg", doa->elevation_deg()}};
  } else {
    fmt::print("dominant_direction: none\n");
  }
  if (!f.json.empty()) WriteText(f.json, summary.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

void AddAnalyze(CLI::App& root, const Globals& globals, std::vector<Command>& out) {
  auto flags = std::make_shared<AnalyzeFlags>();
  CLI::App* app = root.add_subcommand(
      "analyze", "DirAC analysis: per-frame energy/diffuseness CSV and intensity map");
  app->add_option("--in", flags->in, "FOA WAV (ACN/SN3D)")->required();
  app->add_option("--out", flags->out, "Per-frame summary CSV")->required();
  app->add_option("--intensity-map", flags->intensity_map,
                  "CSV of the averaged intensity magnitude, one row per frame");
  app->add_option("--json", flags->json, "Summary JSON");
  flags->stft.Add(app);
  flags->sc.Add(app);
  out.push_back({app, [flags, &globals] { return RunAnalyze(*flags, globals); }});
}

}  // namespace sfoa::cli
