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

#include <memory>

#include <json.hpp>

#include "cli.h"
#include "sfoa/dirac.h"
#include "sfoa/error.h"
#include "sfoa/wav_io.h"

namespace sfoa::cli {
namespace {

struct ScLossFlags {
  std::string input;
  std::string recon;
  std::string dump;
  std::string json;
  StftFlags stft;
  ScFlags sc;
};

int RunScLoss(const ScLossFlags& f, const Globals& g) {
  const ScConfig config = f.sc.Config();
  const StftParams params = f.stft.Params();
  const FoaSignal input = ReadFoaWav(f.input);
  const FoaSignal recon = ReadFoaWav(f.recon);
  if (input.sample_rate() != recon.sample_rate()) {
    throw Error(ErrorCode::kSampleRateMismatch,
                fmt::format("input is {} Hz, reconstruction is {} Hz", input.sample_rate(),
                            recon.sample_rate()));
  }
  if (input.length() != recon.length()) {
    throw Error(ErrorCode::kShapeMismatch,
                fmt::format("input has {} samples, reconstruction has {}", input.length(),
                            recon.length()));
  }
  const ScBreakdown b = ScLoss(ComputeSpectrum(input, params), ComputeSpectrum(recon, params),
                               config);

  double weight_sum = 0.0;
  std::size_t masked = 0;
  for (std::size_t i = 0; i < b.weights.size(); ++i) {
    weight_sum += b.weights.data()[i];
    masked += b.mask.data()[i] > 0.0;
  }
  fmt::print("seed: {}\n", g.seed);
  fmt::print("sc_loss: {}\n", FormatLoss(b.loss));
  fmt::print("sc_loss_full: {:.17g}\n", b.loss);
  fmt::print("active_bins: {} of {}\n", masked, b.mask.size());
  fmt::print("weight_sum: {:.17g}\n", weight_sum);

  if (!f.dump.empty()) {
    WriteText(f.dump + ".s.csv", GridToCsv(b.alignment));
    WriteText(f.dump + ".m.csv", GridToCsv(b.mask));
    WriteText(f.dump + ".w.csv", GridToCsv(b.weights));
    WriteText(f.dump + ".contribution.csv", GridToCsv(b.contribution));
  }
  if (!f.json.empty()) {
    const nlohmann::json j = {{"seed", g.seed},
                              {"input", f.input},
                              {"recon", f.recon},
                              {"tau_e", config.energy_threshold},
                              {"tau_d", config.diffuseness_threshold},
                              {"eps", config.epsilon},
                              {"window", config.window},
                              {"frames", b.mask.frames()},
                              {"bins", b.mask.bins()},
                              {"active_bins", masked},
                              {"weight_sum", weight_sum},
                              {"loss", b.loss}};
    WriteText(f.json, j.dump(2) + "\n");
  }
  return kExitOk;
}

}  // namespace

void AddScLoss(CLI::App& root, const Globals& globals, std::vector<Command>& out) {
  auto flags = std::make_shared<ScLossFlags>();
  CLI::App* app = root.add_subcommand(
      "scloss", "Spatial-consistency loss between an input and a reconstruction");
  app->add_option("--input", flags->input, "Reference FOA WAV")->required();
  app->add_option("--recon", flags->recon, "Reconstructed FOA WAV")->required();
  app->add_option("--dump", flags->dump,
                  "Write <prefix>.s.csv, .m.csv, .w.csv and .contribution.csv grids");
  app->add_option("--json", flags->json, "Result JSON");
  flags->stft.Add(app);
  flags->sc.Add(app);
  out.push_back({app, [flags, &globals] { return RunScLoss(*flags, globals); }});
}

}  // namespace sfoa::cli
