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

// Shared plumbing for the sfoa command-line tool.

#ifndef SFOA_TOOLS_CLI_H_
#define SFOA_TOOLS_CLI_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "sfoa/spatial_consistency.h"
#include "sfoa/stft.h"

namespace sfoa::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

struct Globals {
  std::uint64_t seed = 0;
  bool seed_given = false;
};

// A leaf subcommand and the function that runs it after parsing.
struct Command {
  CLI::App* app;
  std::function<int()> run;
};

// STFT overrides shared by the analysis subcommands.
struct StftFlags {
  int fft_size = 1024;
  int hop = 256;
  int win_length = 1024;

  void Add(CLI::App* app);
  StftParams Params() const { return StftParams::Create(fft_size, hop, win_length); }
};

// Spatial-consistency overrides.
struct ScFlags {
  ScConfig config;

  void Add(CLI::App* app);
  // Validated before the command touches any file.
  ScConfig Config() const {
    config.Validate();
    return config;
  }
};

void AddSpatialize(CLI::App& root, const Globals& globals, std::vector<Command>& out);
void AddAnalyze(CLI::App& root, const Globals& globals, std::vector<Command>& out);
void AddScLoss(CLI::App& root, const Globals& globals, std::vector<Command>& out);
void AddGradCheck(CLI::App& root, const Globals& globals, std::vector<Command>& out);
void AddVq(CLI::App& root, const Globals& globals, std::vector<Command>& out);
void AddEvaluate(CLI::App& root, const Globals& globals, std::vector<Command>& out);

// Six significant digits; an exact zero prints as 0.000000.
std::string FormatLoss(double value);

// Writes `text` to `path` through a temporary file and a rename.
void WriteText(const std::filesystem::path& path, const std::string& text);

}  // namespace sfoa::cli

#endif  // SFOA_TOOLS_CLI_H_
