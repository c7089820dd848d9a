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

#include "sfoa/scene_gen.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "sfoa/error.h"

namespace sfoa {

namespace {

using nlohmann::json;

double UniformUnit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Independent stream per index without correlated neighbouring seeds.
std::uint64_t SubSeed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Uniform random rotation from a uniform unit quaternion (Shoemake).
std::array<Vec3, 3> RandomRotation(std::mt19937_64& rng) {
  const double u1 = UniformUnit(rng);
  const double u2 = 2.0 * std::numbers::pi * UniformUnit(rng);
  const double u3 = 2.0 * std::numbers::pi * UniformUnit(rng);
  const double a = std::sqrt(1.0 - u1);
  const double b = std::sqrt(u1);
  const double w = a * std::sin(u2);
  const double x = a * std::cos(u2);
  const double y = b * std::sin(u3);
  const double z = b * std::cos(u3);
  return {{{1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)},
           {2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)},
           {2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)}}};
}

NoiseKind ParseNoiseKind(const std::string& s) {
  if (s == "white") return NoiseKind::kWhite;
  if (s == "pink") return NoiseKind::kPink;
  throw Error(ErrorCode::kFormat, "unknown noise kind '" + s + "'");
}

}  // namespace

void DiffuseFieldSpec::Validate() const {
  if (num_directions < 4) {
    throw Error(ErrorCode::kInvalidArgument,
                "a diffuse field needs at least 4 directions");
  }
  if (!(level >= 0.0) || !std::isfinite(level)) {
    throw Error(ErrorCode::kInvalidArgument, "diffuse level must be >= 0");
  }
}

void SceneManifest::Validate() const {
  if (sources.size() > static_cast<std::size_t>(kMaxSceneSources)) {
    throw Error(ErrorCode::kTooManySources,
                "a scene holds at most 5 directional sources, got " +
                    std::to_string(sources.size()));
  }
  if (sources.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "a scene needs at least one directional source");
  }
  for (const auto& s : sources) {
    if (!(s.gain > 0.0) || !std::isfinite(s.gain)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "source '" + s.id + "' needs a positive gain");
    }
  }
  if (!(diffuse_level >= 0.0) || !(duration_seconds >= 0.0) || sample_rate <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "diffuse level, duration and sample rate must be non-negative");
  }
  if (diffuse_level > 0.0) {
    DiffuseFieldSpec{diffuse_directions, diffuse_level, diffuse_noise, seed}
        .Validate();
  }
}

SceneManifest ManifestFromJson(const json& j) {
  try {
    SceneManifest m;
    for (const auto& s : j.at("sources")) {
      SceneSource src;
      src.direction = Direction::FromDegrees(s.at("azimuth_deg").get<double>(),
                                             s.at("elevation_deg").get<double>());
      src.gain = s.value("gain", 1.0);
      src.id = s.at("file").get<std::string>();
      m.sources.push_back(std::move(src));
    }
    m.diffuse_level = j.value("diffuse_level", 0.0);
    m.seed = j.value("seed", std::uint64_t{0});
    m.duration_seconds = j.value("duration_s", 0.0);
    m.sample_rate = j.value("sample_rate", kDefaultSampleRate);
    m.diffuse_directions = j.value("diffuse_directions", kDefaultDiffuseDirections);
    m.diffuse_noise = ParseNoiseKind(j.value("diffuse_noise", std::string("white")));
    m.Validate();
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("bad scene manifest: ") + e.what());
  }
}

json ManifestToJson(const SceneManifest& m) {
  json sources = json::array();
  for (const auto& s : m.sources) {
    sources.push_back({{"azimuth_deg", s.direction.azimuth_deg()},
                       {"elevation_deg", s.direction.elevation_deg()},
                       {"gain", s.gain},
                       {"file", s.id}});
  }
  return {{"sources", sources},
          {"diffuse_level", m.diffuse_level},
          {"diffuse_noise", m.diffuse_noise == NoiseKind::kPink ? "pink" : "white"},
          {"diffuse_directions", m.diffuse_directions},
          {"duration_s", m.duration_seconds},
          {"sample_rate", m.sample_rate},
          {"seed", m.seed}};
}

SceneManifest LoadManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
  return ManifestFromJson(j);
}

std::vector<Direction> UniformSphereDirections(int n, std::uint64_t seed) {
  if (n < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one direction");
  }
  std::mt19937_64 rng(seed);
  const auto rot = RandomRotation(rng);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Direction> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const Vec3 p = {r * std::cos(golden * i), r * std::sin(golden * i), z};
    const Vec3 q = {Dot(rot[0], p), Dot(rot[1], p), Dot(rot[2], p)};
    out.push_back(Direction::FromVector(q));
  }
  return out;
}

std::vector<double> GenerateNoise(NoiseKind kind, std::size_t length,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out(length);
  if (kind == NoiseKind::kWhite) {
    for (double& v : out) v = normal(rng);
    return out;
  }
  // Paul Kellet's refined pink filter.
  double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
  for (double& v : out) {
    const double white = normal(rng);
    b0 = 0.99886 * b0 + white * 0.0555179;
    b1 = 0.99332 * b1 + white * 0.0750759;
    b2 = 0.96900 * b2 + white * 0.1538520;
    b3 = 0.86650 * b3 + white * 0.3104856;
    b4 = 0.55000 * b4 + white * 0.5329522;
    b5 = -0.7616 * b5 - white * 0.0168980;
    v = (b0 + b1 + b2 + b3 + b4 + b5 + b6 + white * 0.5362) * 0.11;
    b6 = white * 0.115926;
  }
  return out;
}

FoaSignal GenerateDiffuse(const DiffuseFieldSpec& spec, double duration_seconds,
                          int sample_rate) {
  spec.Validate();
  if (!(duration_seconds > 0.0) || sample_rate <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "diffuse field needs a positive duration and sample rate");
  }
  const auto length =
      static_cast<std::size_t>(std::llround(duration_seconds * sample_rate));
  if (spec.level == 0.0) return FoaSignal::Zeros(sample_rate, length);

  const auto dirs = UniformSphereDirections(spec.num_directions, spec.seed);
  FoaSignal::Channels acc;
  for (auto& c : acc) c.assign(length, 0.0);
  for (int i = 0; i < spec.num_directions; ++i) {
    const auto noise = GenerateNoise(spec.noise, length, SubSeed(spec.seed, i));
    const auto gains = EncodingGains(dirs[i]);
    for (int c = 0; c < kNumFoaChannels; ++c) {
      for (std::size_t n = 0; n < length; ++n) acc[c][n] += gains[c] * noise[n];
    }
  }
  double power = 0.0;
  for (double v : acc[kChannelW]) power += v * v;
  const double rms = std::sqrt(power / static_cast<double>(std::max<std::size_t>(length, 1)));
  const double scale = rms > 0.0 ? spec.level / rms : 0.0;
  for (auto& c : acc) {
    for (double& v : c) v *= scale;
  }
  return FoaSignal(sample_rate, std::move(acc));
}

Scene GenerateScene(const SceneManifest& manifest,
                    const std::map<std::string, std::vector<double>>& audio) {
  manifest.Validate();
  std::size_t length = 0;
  if (manifest.duration_seconds > 0.0) {
    length = static_cast<std::size_t>(
        std::llround(manifest.duration_seconds * manifest.sample_rate));
  }
  for (const auto& s : manifest.sources) {
    auto it = audio.find(s.id);
    if (it == audio.end()) {
      throw Error(ErrorCode::kMissingAudio, "no audio for source '" + s.id + "'");
    }
    if (manifest.duration_seconds == 0.0) length = std::max(length, it->second.size());
  }
  if (length == 0) {
    throw Error(ErrorCode::kEmptyInput, "scene would have zero samples");
  }

  Scene scene;
  std::vector<FoaSignal> parts;
  for (const auto& s : manifest.sources) {
    const auto& mono = audio.at(s.id);
    std::vector<double> shaped(length, 0.0);
    const std::size_t n = std::min(length, mono.size());
    for (std::size_t i = 0; i < n; ++i) shaped[i] = s.gain * mono[i];
    parts.push_back(EncodeSource(shaped, s.direction, manifest.sample_rate));
    scene.truth.push_back(s.direction);
  }
  if (manifest.diffuse_level > 0.0) {
    const DiffuseFieldSpec spec{manifest.diffuse_directions, manifest.diffuse_level,
                                manifest.diffuse_noise, manifest.seed};
    parts.push_back(GenerateDiffuse(
        spec, static_cast<double>(length) / manifest.sample_rate,
        manifest.sample_rate));
  }
  scene.signal = Mix(parts);
  return scene;
}

json TruthToJson(const SceneManifest& manifest,
                 const std::vector<Direction>& truth) {
  json sources = json::array();
  for (std::size_t i = 0; i < truth.size(); ++i) {
    sources.push_back({{"file", i < manifest.sources.size() ? manifest.sources[i].id : ""},
                       {"azimuth_deg", truth[i].azimuth_deg()},
                       {"elevation_deg", truth[i].elevation_deg()}});
  }
  return {{"seed", manifest.seed},
          {"diffuse_level", manifest.diffuse_level},
          {"sources", sources}};
}

std::vector<Direction> TruthFromJson(const json& j) {
  try {
    std::vector<Direction> out;
    for (const auto& s : j.at("sources")) {
      out.push_back(Direction::FromDegrees(s.at("azimuth_deg").get<double>(),
                                           s.at("elevation_deg").get<double>()));
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("bad truth file: ") + e.what());
  }
}

}  // namespace sfoa
