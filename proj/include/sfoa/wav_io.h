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

#ifndef SFOA_WAV_IO_H_
#define SFOA_WAV_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sfoa/foa_signal.h"

namespace sfoa {

enum class WavEncoding { kPcm16, kFloat32 };

struct WavData {
  int sample_rate = 0;
  WavEncoding encoding = WavEncoding::kFloat32;
  std::vector<std::vector<double>> channels;
};

// RIFF/WAVE with PCM16 or IEEE float32 samples (plain or extensible fmt).
// Throws kWavMalformed, kWavUnsupportedEncoding or kWavTruncated.
WavData ReadWav(const std::filesystem::path& path);
WavData ParseWav(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> SerializeWav(
    int sample_rate, std::span<const std::vector<double>> channels,
    WavEncoding encoding);
// Writes through a temporary file and renames into place.
void WriteWav(const std::filesystem::path& path, int sample_rate,
              std::span<const std::vector<double>> channels,
              WavEncoding encoding);

// 4-channel ACN files; any other channel count is kWavChannelCount.
FoaSignal ReadFoaWav(const std::filesystem::path& path);
void WriteFoaWav(const std::filesystem::path& path, const FoaSignal& signal,
                 WavEncoding encoding = WavEncoding::kFloat32);

// Reads a single-channel file. Multi-channel files are rejected.
std::vector<double> ReadMonoWav(const std::filesystem::path& path,
                                int* sample_rate = nullptr);

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path);
void WriteFileAtomically(const std::filesystem::path& path,
                         std::span<const std::uint8_t> bytes);
void WriteFileAtomically(const std::filesystem::path& path,
                         const std::string& text);

}  // namespace sfoa

#endif  // SFOA_WAV_IO_H_
