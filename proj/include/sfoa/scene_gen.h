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

#ifndef SFOA_SCENE_GEN_H_
#define SFOA_SCENE_GEN_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "sfoa/foa_signal.h"

namespace sfoa {

inline constexpr int kMaxSceneSources = 5;
inline constexpr int kDefaultDiffuseDirections = 64;

enum class NoiseKind { kWhite, kPink };

struct DiffuseFieldSpec {
  int num_directions = kDefaultDiffuseDirections;
  double level = 0.0;  // RMS of the W channel
  NoiseKind noise = NoiseKind::kWhite;
  std::uint64_t seed = 0;

  void Validate() const;
};

struct SceneSource {
  Direction direction;
  double gain = 1.0;
  std::string id;  // key into the source audio map (the manifest's `file`)
};

struct SceneManifest {
  std::vector<SceneSource> sources;
  double diffuse_level = 0.0;
  NoiseKind diffuse_noise = NoiseKind::kWhite;
  int diffuse_directions = kDefaultDiffuseDirections;
  // 0 means "as long as the longest source".
  double duration_seconds = 0.0;
  int sample_rate = kDefaultSampleRate;
  std::uint64_t seed = 0;

  // 1..5 sources with positive gains; kTooManySources beyond five.
  void Validate() const;
};

SceneManifest ManifestFromJson(const nlohmann::json& j);
nlohmann::json ManifestToJson(const SceneManifest& manifest);
SceneManifest LoadManifest(const std::filesystem::path& path);

// Fibonacci lattice under a seeded uniformly random rotation.
std::vector<Direction> UniformSphereDirections(int n, std::uint64_t seed);

std::vector<double> GenerateNoise(NoiseKind kind, std::size_t length,
                                  std::uint64_t seed);

// Uncorrelated noise sources encoded from `num_directions` directions,
// scaled so the W channel has RMS `level`.
FoaSignal GenerateDiffuse(const DiffuseFieldSpec& spec, double duration_seconds,
                          int sample_rate = kDefaultSampleRate);

struct Scene {
  FoaSignal signal;
  std::vector<Direction> truth;  // one per directional source, manifest order
};

// Throws kMissingAudio naming the id when a source has no audio.
Scene GenerateScene(const SceneManifest& manifest,
                    const std::map<std::string, std::vector<double>>& audio);

nlohmann::json TruthToJson(const SceneManifest& manifest,
                           const std::vector<Direction>& truth);
// Directions from a `*.truth.json` document.
std::vector<Direction> TruthFromJson(const nlohmann::json& j);

}  // namespace sfoa

#endif  // SFOA_SCENE_GEN_H_
