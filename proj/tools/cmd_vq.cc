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

#include <cmath>
#include <memory>
#include <random>

#include <json.hpp>

#include "cli.h"
#include "sfoa/error.h"
#include "sfoa/vector_quantizer.h"

namespace sfoa::cli {
namespace {

struct VqFlags {
  std::string latents;
  std::string codebook;
  std::string tokens;
  std::string out;
  std::string centers;
  std::size_t size = 0;
  int iterations = 20;
  int ema_passes = 0;
  int staleness = kDefaultStalenessThreshold;
  std::size_t clusters = 4;
  std::size_t per_cluster = 64;
  std::size_t dim = 8;
  double separation = 10.0;
  double spread = 0.01;
};

void CheckTokenWidth(std::size_t size) {
  if (size > kMaxTokenCodebookSize) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("codebook size {} exceeds {}: token indices are 16-bit", size,
                            kMaxTokenCodebookSize));
  }
}

void PrintStats(std::size_t size, std::span<const std::uint32_t> indices) {
  const CodebookStats s = ComputeCodebookStats(size, indices);
  fmt::print("perplexity: {:.6f}\n", s.perplexity);
  fmt::print("usage_fraction: {:.6f}\n", s.usage_fraction);
}

int RunTrain(const VqFlags& f, const Globals& g) {
  if (f.size < 1) throw Error(ErrorCode::kInvalidArgument, "--size must be >= 1");
  CheckTokenWidth(f.size);
  const LatentBatch latents = ReadLatents(f.latents);
  Codebook cb = KMeansInit(latents, f.size, f.iterations, g.seed);
  std::mt19937_64 rng(g.seed);
  std::size_t reactivated = 0;
  for (int pass = 0; pass < f.ema_passes; ++pass) {
    EmaUpdate(cb, latents, Quantize(cb, latents).indices);
    reactivated += ReactivateDeadCodes(cb, latents, f.staleness, rng);
  }
  cb.Validate();
  WriteCodebook(f.codebook, cb);
  const Quantized q = Quantize(cb, latents);
  fmt::print("seed: {}\n", g.seed);
  fmt::print("codebook: {} x {}\n", cb.size(), cb.dim());
  fmt::print("latents: {}\n", latents.rows());
  fmt::print("reactivated: {}\n", reactivated);
  fmt::print("commitment_loss: {:.9g}\n", q.commitment_loss);
  PrintStats(cb.size(), q.indices);
  return kExitOk;
}

int RunEncode(const VqFlags& f, const Globals& g) {
  const Codebook cb = ReadCodebook(f.codebook);
  CheckTokenWidth(cb.size());
  const LatentBatch latents = ReadLatents(f.latents);
  const Quantized q = Quantize(cb, latents);
  WriteTokens(f.tokens, q.indices);
  fmt::print("seed: {}\n", g.seed);
  fmt::print("tokens: {}\n", q.indices.size());
  fmt::print("commitment_loss: {:.9g}\n", q.commitment_loss);
  fmt::print("bitrate_bps: {:.1f}\n",
             latents.frames_per_second() * std::log2(static_cast<double>(cb.size())));
  PrintStats(cb.size(), q.indices);
  return kExitOk;
}

int RunDecode(const VqFlags& f, const Globals& g) {
  const Codebook cb = ReadCodebook(f.codebook);
  const auto tokens = ReadTokens(f.tokens);
  WriteLatents(f.out, Dequantize(cb, tokens));
  fmt::print("seed: {}\n", g.seed);
  fmt::print("vectors: {}\n", tokens.size());
  return kExitOk;
}

int RunStats(const VqFlags& f, const Globals& g) {
  std::size_t size = f.size;
  if (!f.codebook.empty()) size = ReadCodebook(f.codebook).size();
  if (size < 1) throw Error(ErrorCode::kInvalidArgument, "give --codebook or --size");
  CheckTokenWidth(size);
  const auto tokens = ReadTokens(f.tokens);
  fmt::print("seed: {}\n", g.seed);
  fmt::print("tokens: {}\n", tokens.size());
  PrintStats(size, tokens);
  return kExitOk;
}

int RunSynth(const VqFlags& f, const Globals& g) {
  std::vector<std::vector<double>> centers;
  const LatentBatch x = MakeClusteredLatents(f.clusters, f.per_cluster, f.dim, f.separation,
                                             f.spread, g.seed, &centers);
  WriteLatents(f.out, x);
  if (!f.centers.empty()) {
    WriteText(f.centers, nlohmann::json({{"seed", g.seed}, {"centers", centers}}).dump(2) + "\n");
  }
  fmt::print("seed: {}\n", g.seed);
  fmt::print("latents: {} x {}\n", x.rows(), x.dim());
  return kExitOk;
}

}  // namespace

void AddVq(CLI::App& root, const Globals& globals, std::vector<Command>& out) {
  auto f = std::make_shared<VqFlags>();
  CLI::App* vq = root.add_subcommand("vq", "Vector-quantizer bottleneck tools");
  vq->require_subcommand(1);

  CLI::App* train = vq->add_subcommand("train", "K-means initialization plus optional EMA passes");
  train->add_option("--latents", f->latents, "Latent batch file")->required();
  train->add_option("--codebook", f->codebook, "Output codebook file")->required();
  train->add_option("--size", f->size, "Codebook entries (<= 65536)")->required();
  train->add_option("--iters", f->iterations, "Lloyd iterations")->capture_default_str();
  train->add_option("--ema-passes", f->ema_passes,
                    "EMA updates with dead-code reactivation after k-means")
      ->capture_default_str();
  train->add_option("--staleness", f->staleness, "Batches unused before a code is reset")
      ->capture_default_str();
  out.push_back({train, [f, &globals] { return RunTrain(*f, globals); }});

  CLI::App* encode = vq->add_subcommand("encode", "Quantize latents to a 16-bit token stream");
  encode->add_option("--latents", f->latents, "Latent batch file")->required();
  encode->add_option("--codebook", f->codebook, "Codebook file")->required();
  encode->add_option("--tokens", f->tokens, "Output token file")->required();
  out.push_back({encode, [f, &globals] { return RunEncode(*f, globals); }});

  CLI::App* decode = vq->add_subcommand("decode", "Look tokens up in a codebook");
  decode->add_option("--tokens", f->tokens, "Token file")->required();
  decode->add_option("--codebook", f->codebook, "Codebook file")->required();
  decode->add_option("--out", f->out, "Output latent batch file")->required();
  out.push_back({decode, [f, &globals] { return RunDecode(*f, globals); }});

  CLI::App* stats = vq->add_subcommand("stats", "Perplexity and usage of a token stream");
  stats->add_option("--tokens", f->tokens, "Token file")->required();
  stats->add_option("--codebook", f->codebook, "Codebook file (gives the size)");
  stats->add_option("--size", f->size, "Codebook size when no codebook is given");
  out.push_back({stats, [f, &globals] { return RunStats(*f, globals); }});

  CLI::App* synth = vq->add_subcommand("synth", "Write a clustered latent fixture");
  synth->add_option("--out", f->out, "Output latent batch file")->required();
  synth->add_option("--clusters", f->clusters, "Number of clusters")->capture_default_str();
  synth->add_option("--per-cluster", f->per_cluster, "Vectors per cluster")
      ->capture_default_str();
  synth->add_option("--dim", f->dim, "Vector dimension")->capture_default_str();
  synth->add_option("--separation", f->separation, "Distance between centers")
      ->capture_default_str();
  synth->add_option("--spread", f->spread, "Per-coordinate standard deviation")
      ->capture_default_str();
  synth->add_option("--centers", f->centers, "Also write the true centers as JSON");
  out.push_back({synth, [f, &globals] { return RunSynth(*f, globals); }});
}

}  // namespace sfoa::cli
