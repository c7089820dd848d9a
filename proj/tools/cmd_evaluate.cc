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
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "cli.h"
#include "sfoa/error.h"
#include "sfoa/eval_metrics.h"
#include "sfoa/scene_gen.h"
#include "sfoa/wav_io.h"

namespace sfoa::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct EvaluateFlags {
  std::string pairs;
  std::string input_dir;
  std::string recon_dir;
  std::string truth_dir;
  std::string json_out;
  std::string csv_out;
  ScFlags sc;
};

struct Pair {
  fs::path input;
  fs::path recon;
};

// One pair per line: "<input.wav> <recon.wav>"; '#' starts a comment.
// Relative paths are resolved against the list's directory.
std::vector<Pair> ReadPairList(const fs::path& list) {
  std::ifstream in(list);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + list.string());
  std::vector<Pair> pairs;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = line.substr(0, line.find('#'));
    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a)) continue;
    if (!(fields >> b) || (fields >> extra)) {
      throw Error(ErrorCode::kFormat,
                  fmt::format("{}:{}: expected two paths", list.string(), number));
    }
    const fs::path base = list.parent_path();
    pairs.push_back({fs::path(a).is_absolute() ? fs::path(a) : base / a,
                     fs::path(b).is_absolute() ? fs::path(b) : base / b});
  }
  return pairs;
}

// Every *.wav in the input directory, matched by name in the recon directory.
std::vector<Pair> PairDirectories(const fs::path& inputs, const fs::path& recons) {
  if (!fs::is_directory(inputs) || !fs::is_directory(recons)) {
    throw Error(ErrorCode::kIo, "input and recon directories must exist");
  }
  std::vector<fs::path> names;
  for (const auto& entry : fs::directory_iterator(inputs)) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav") {
      names.push_back(entry.path().filename());
    }
  }
  std::sort(names.begin(), names.end());
  std::vector<Pair> pairs;
  for (const auto& name : names) {
    if (!fs::exists(recons / name)) {
      throw Error(ErrorCode::kIo, "no reconstruction for " + name.string() + " in " +
                                      recons.string());
    }
    pairs.push_back({inputs / name, recons / name});
  }
  return pairs;
}

// Ground truth for single-source scenes only: spatial errors are defined per
// source, so multi-source truth files fall back to the input's own DOA
// estimate.
std::optional<Direction> LoadTruth(const fs::path& dir, const fs::path& input) {
  if (dir.empty()) return std::nullopt;
  const fs::path path = dir / (input.stem().string() + ".truth.json");
  if (!fs::exists(path)) return std::nullopt;
  std::ifstream in(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
  const auto truth = TruthFromJson(j);
  if (truth.size() != 1) return std::nullopt;
  return truth.front();
}

int RunEvaluate(const EvaluateFlags& f, const Globals& g) {
  const ScConfig config = f.sc.Config();
  std::vector<Pair> pairs;
  if (!f.pairs.empty()) {
    pairs = ReadPairList(f.pairs);
  } else if (!f.input_dir.empty() && !f.recon_dir.empty()) {
    pairs = PairDirectories(f.input_dir, f.recon_dir);
  } else {
    throw Error(ErrorCode::kInvalidArgument, "give --pairs or both --input-dir and --recon-dir");
  }
  if (pairs.empty()) throw Error(ErrorCode::kEmptyInput, "no pairs to evaluate");

  std::vector<EvalReport> reports;
  for (const Pair& p : pairs) {
    EvalReport r = EvaluatePair(ReadFoaWav(p.input), ReadFoaWav(p.recon),
                                LoadTruth(f.truth_dir, p.input), config);
    r.name = p.input.filename().string();
    reports.push_back(std::move(r));
  }
  const EvalAggregate agg = Aggregate(reports);

  json files = json::array();
  for (const auto& r : reports) files.push_back(ReportToJson(r));
  const json doc = {{"seed", g.seed},
                    {"config",
                     {{"tau_e", config.energy_threshold},
                      {"tau_d", config.diffuseness_threshold},
                      {"eps", config.epsilon},
                      {"window", config.window}}},
                    {"files", files},
                    {"aggregate", AggregateToJson(agg)}};
  if (!f.json_out.empty()) WriteText(f.json_out, doc.dump(2) + "\n");
  if (!f.csv_out.empty()) WriteText(f.csv_out, ReportsToCsv(reports));

  fmt::print("seed: {}\n", g.seed);
  fmt::print("files: {}\n", agg.files);
  fmt::print("spatial_files: {}\n", agg.spatial_files);
  fmt::print("azimuth_error_deg: {:.6f}\n", agg.azimuth_error_deg);
  fmt::print("elevation_error_deg: {:.6f}\n", agg.elevation_error_deg);
  fmt::print("angular_error_deg: {:.6f}\n", agg.angular_error_deg);
  fmt::print("stft_distance: {:.6f}\n", agg.stft_distance);
  fmt::print("mel_distance: {:.6f}\n", agg.mel_distance);
  return kExitOk;
}

}  // namespace

void AddEvaluate(CLI::App& root, const Globals& globals, std::vector<Command>& out) {
  auto flags = std::make_shared<EvaluateFlags>();
  CLI::App* app = root.add_subcommand(
      "evaluate", "Spatial and acoustic reconstruction metrics over file pairs");
  app->add_option("--pairs", flags->pairs, "Text file with one '<input> <recon>' pair per line");
  app->add_option("--input-dir", flags->input_dir, "Directory of reference FOA WAVs");
  app->add_option("--recon-dir", flags->recon_dir,
                  "Directory of reconstructions with matching file names");
  app->add_option("--truth-dir", flags->truth_dir,
                  "Directory of <stem>.truth.json sidecars (single-source truth is used)");
  app->add_option("--json", flags->json_out, "Per-file and aggregate report JSON");
  app->add_option("--csv", flags->csv_out, "Per-file report CSV");
  flags->sc.Add(app);
  out.push_back({app, [flags, &globals] { return RunEvaluate(*flags, globals); }});
}

}  // namespace sfoa::cli
