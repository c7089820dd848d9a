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

#include <map>
#include <memory>

#include "cli.h"
#include "sfoa/error.h"
#include "sfoa/scene_gen.h"
#include "sfoa/wav_io.h"

namespace sfoa::cli {
namespace {

struct SpatializeFlags {
  std::string manifest;
  std::string audio_dir;
  std::string out;
  std::string truth;
  bool pcm16 = false;
};

std::filesystem::path TruthPath(const std::filesystem::path& wav) {
  std::filesystem::path p = wav;
  p.replace_extension(".truth.json");
  return p;
}

int RunSpatialize(const SpatializeFlags& f, const Globals& g) {
  SceneManifest manifest = LoadManifest(f.manifest);
  if (g.seed_given) manifest.seed = g.seed;
  manifest.Validate();

  const std::filesystem::path dir =
      f.audio_dir.empty() ? std::filesystem::path(f.manifest).parent_path()
                          : std::filesystem::path(f.audio_dir);
  std::map<std::string, std::vector<double>> audio;
  for (const auto& s : manifest.sources) {
    if (audio.count(s.id)) continue;
    const auto path = dir / s.id;
    if (!std::filesystem::exists(path)) {
      throw Error(ErrorCode::kMissingAudio,
                  "no audio for source '" + s.id + "' (looked for " + path.string() + ")");
    }
    int rate = 0;
    audio[s.id] = ReadMonoWav(path, &rate);
    if (rate != manifest.sample_rate) {
      throw Error(ErrorCode::kSampleRateMismatch,
                  "source '" + s.id + "' is " + std::to_string(rate) + " Hz, scene is " +
                      std::to_string(manifest.sample_rate) + " Hz");
    }
  }

  const Scene scene = GenerateScene(manifest, audio);
  const std::filesystem::path out(f.out);
  const std::filesystem::path truth = f.truth.empty() ? TruthPath(out) : std::filesystem::path(f.truth);
  WriteFoaWav(out, scene.signal, f.pcm16 ? WavEncoding::kPcm16 : WavEncoding::kFloat32);
  WriteText(truth, TruthToJson(manifest, scene.truth).dump(2) + "\n");

  fmt::print("seed: {}\n", manifest.seed);
  fmt::print("sources: {}\n", manifest.sources.size());
  fmt::print("samples: {}\n", scene.signal.length());
  fmt::print("sample_rate: {}\n", scene.signal.sample_rate());
  fmt::print("wrote: {}\n", out.string());
  fmt::print("truth: {}\n", truth.string());
  return kExitOk;
}

}  // namespace

void AddSpatialize(CLI::App& root, const Globals& globals, std::vector<Command>& out) {
  auto flags = std::make_shared<SpatializeFlags>();
  CLI::App* app = root.add_subcommand(
      "spatialize", "Render a scene manifest to a 4-channel FOA WAV plus a truth sidecar");
  app->add_option("--manifest", flags->manifest, "Scene manifest JSON")
      ->required()
      ->check(CLI::ExistingFile);
  app->add_option("--audio-dir", flags->audio_dir,
                  "Directory holding the sources' mono WAVs (default: manifest's directory)");
  app->add_option("--out", flags->out, "Output FOA WAV")->required();
  app->add_option("--truth", flags->truth,
                  "Truth sidecar path (default: <out stem>.truth.json)");
  app->add_flag("--pcm16", flags->pcm16, "Write 16-bit PCM instead of 32-bit float");
  out.push_back({app, [flags, &globals] { return RunSpatialize(*flags, globals); }});
}

}  // namespace sfoa::cli
