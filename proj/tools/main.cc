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

// sfoa: scene generation, DirAC analysis, spatial-consistency loss, VQ
// bottleneck tooling and reconstruction metrics for first-order ambisonics.

#include <cstdio>
#include <exception>
#include <memory>

#include <fmt/core.h>

#include "cli.h"
#include "json_config.h"
#include "sfoa/error.h"
#include "sfoa/wav_io.h"

namespace sfoa::cli {

void StftFlags::Add(CLI::App* app) {
  app->add_option("--fft", fft_size, "STFT size")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--hop", hop, "STFT hop in samples")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app->add_option("--win-length", win_length, "Hann window length (<= fft)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

void ScFlags::Add(CLI::App* app) {
  app->add_option("--tau-e", config.energy_threshold, "Energy threshold of the mask")
      ->capture_default_str();
  app->add_option("--tau-d", config.diffuseness_threshold,
                  "Diffuseness threshold of the mask")
      ->capture_default_str();
  app->add_option("--eps", config.epsilon, "Cosine stabilizer (0 allowed)")
      ->capture_default_str();
  app->add_option("--window", config.window, "Diffuseness averaging window, odd frames")
      ->capture_default_str();
}

std::string FormatLoss(double value) {
  if (value == 0.0) return "0.000000";
  return fmt::format("{:.6g}", value);
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  WriteFileAtomically(path, text);
}

namespace {

int Run(int argc, char** argv) {
  CLI::App app{"First-order ambisonics scene, loss and metric tools", "sfoa"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file with option defaults (flags override)");
  app.require_subcommand(1);
  app.fallthrough();

  Globals globals;
  CLI::Option* seed = app.add_option("--seed", globals.seed,
                                     "Random seed (printed in every output)")
                          ->capture_default_str();

  std::vector<Command> commands;
  AddSpatialize(app, globals, commands);
  AddAnalyze(app, globals, commands);
  AddScLoss(app, globals, commands);
  AddGradCheck(app, globals, commands);
  AddVq(app, globals, commands);
  AddEvaluate(app, globals, commands);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  globals.seed_given = seed->count() > 0;

  for (const Command& c : commands) {
    if (c.app->parsed()) return c.run();
  }
  fmt::print(stderr, "error: no command given\n");
  return kExitUsage;
}

}  // namespace
}  // namespace sfoa::cli

int main(int argc, char** argv) {
  try {
    return sfoa::cli::Run(argc, argv);
  } catch (const sfoa::Error& e) {
    fmt::print(stderr, "error [{}]: {}\n", sfoa::ErrorCodeName(e.code()), e.what());
    return sfoa::cli::kExitUsage;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return sfoa::cli::kExitUsage;
  }
}
