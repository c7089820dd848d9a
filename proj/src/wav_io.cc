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

#include "sfoa/wav_io.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <random>
#include <system_error>

#include "sfoa/error.h"

namespace sfoa {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;
constexpr double kPcm16Scale = 32767.0;

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t position() const { return pos_; }

  std::uint32_t U32() {
    Need(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | bytes_[pos_ + i];
    pos_ += 4;
    return v;
  }
  std::uint16_t U16() {
    Need(2);
    std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] |
                                                 (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::string Tag() {
    Need(4);
    std::string tag(reinterpret_cast<const char*>(bytes_.data() + pos_), 4);
    pos_ += 4;
    return tag;
  }
  std::span<const std::uint8_t> Take(std::size_t n) {
    Need(n);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  void Skip(std::size_t n) { Take(n); }

 private:
  void Need(std::size_t n) const {
    if (remaining() < n) {
      throw Error(ErrorCode::kWavTruncated, "WAV file is truncated");
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void PutU16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}
void PutTag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

WavData ParseWav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12) {
    throw Error(ErrorCode::kWavMalformed, "not a RIFF/WAVE file");
  }
  ByteReader r(bytes);
  const std::string riff = r.Tag();
  r.U32();
  const std::string wave = r.Tag();
  if (riff != "RIFF" || wave != "WAVE") {
    throw Error(ErrorCode::kWavMalformed, "not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  std::uint16_t format = 0;
  std::uint16_t num_channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
  while (true) {
    if (r.remaining() < 8) {
      throw Error(have_fmt ? ErrorCode::kWavTruncated : ErrorCode::kWavMalformed,
                  "WAV file has no data chunk");
    }
    const std::string id = r.Tag();
    const std::uint32_t size = r.U32();
    if (id == "fmt ") {
      if (size < 16) throw Error(ErrorCode::kWavMalformed, "short fmt chunk");
      ByteReader fmt(r.Take(size));
      format = fmt.U16();
      num_channels = fmt.U16();
      sample_rate = fmt.U32();
      fmt.U32();  // byte rate
      fmt.U16();  // block align
      bits = fmt.U16();
      if (format == kFormatExtensible && size >= 40) {
        fmt.U16();  // cbSize
        fmt.U16();  // valid bits
        fmt.U32();  // channel mask
        format = fmt.U16();  // leading bytes of the subformat GUID
      }
      have_fmt = true;
      if (size % 2) r.Skip(1);
    } else if (id == "data") {
      if (!have_fmt) {
        throw Error(ErrorCode::kWavMalformed, "data chunk before fmt chunk");
      }
      const bool pcm16 = format == kFormatPcm && bits == 16;
      const bool float32 = format == kFormatFloat && bits == 32;
      if (!pcm16 && !float32) {
        throw Error(ErrorCode::kWavUnsupportedEncoding,
                    "unsupported WAV encoding (format " +
                        std::to_string(format) + ", " + std::to_string(bits) +
                        " bits); expected PCM16 or float32");
      }
      if (num_channels == 0 || sample_rate == 0) {
        throw Error(ErrorCode::kWavMalformed, "WAV declares zero channels or rate");
      }
      const std::size_t bytes_per_sample = bits / 8;
      const std::size_t frame_bytes = bytes_per_sample * num_channels;
      if (size > r.remaining() || size % frame_bytes != 0) {
        throw Error(ErrorCode::kWavTruncated, "WAV data chunk is truncated");
      }
      const auto payload = r.Take(size);
      const std::size_t frames = size / frame_bytes;
      WavData out;
      out.sample_rate = static_cast<int>(sample_rate);
      out.encoding = pcm16 ? WavEncoding::kPcm16 : WavEncoding::kFloat32;
      out.channels.assign(num_channels, std::vector<double>(frames));
      const std::uint8_t* p = payload.data();
      for (std::size_t n = 0; n < frames; ++n) {
        for (std::size_t c = 0; c < num_channels; ++c) {
          if (pcm16) {
            const auto raw = static_cast<std::int16_t>(p[0] | (p[1] << 8));
            out.channels[c][n] = raw / kPcm16Scale;
          } else {
            const std::uint32_t raw = static_cast<std::uint32_t>(p[0]) |
                                      (static_cast<std::uint32_t>(p[1]) << 8) |
                                      (static_cast<std::uint32_t>(p[2]) << 16) |
                                      (static_cast<std::uint32_t>(p[3]) << 24);
            out.channels[c][n] = std::bit_cast<float>(raw);
          }
          p += bytes_per_sample;
        }
      }
      return out;
    } else {
      r.Skip(size + (size % 2));
    }
  }
}

WavData ReadWav(const std::filesystem::path& path) {
  const auto bytes = ReadFileBytes(path);
  return ParseWav(bytes);
}

std::vector<std::uint8_t> SerializeWav(
    int sample_rate, std::span<const std::vector<double>> channels,
    WavEncoding encoding) {
  if (channels.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot write a WAV with no channels");
  }
  const std::size_t frames = channels[0].size();
  for (const auto& c : channels) {
    if (c.size() != frames) {
      throw Error(ErrorCode::kShapeMismatch, "WAV channels differ in length");
    }
  }
  const bool pcm16 = encoding == WavEncoding::kPcm16;
  const std::uint16_t num_channels = static_cast<std::uint16_t>(channels.size());
  const std::uint16_t bits = pcm16 ? 16 : 32;
  const std::uint16_t block_align = num_channels * bits / 8;
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(frames * block_align);
  // Float files carry the extended fmt (cbSize = 0) and a fact chunk.
  const std::uint32_t fmt_size = pcm16 ? 16 : 18;
  const std::uint32_t fact_bytes = pcm16 ? 0 : 12;

  std::vector<std::uint8_t> out;
  out.reserve(44 + fact_bytes + data_bytes);
  PutTag(out, "RIFF");
  PutU32(out, 4 + (8 + fmt_size) + fact_bytes + (8 + data_bytes));
  PutTag(out, "WAVE");
  PutTag(out, "fmt ");
  PutU32(out, fmt_size);
  PutU16(out, pcm16 ? kFormatPcm : kFormatFloat);
  PutU16(out, num_channels);
  PutU32(out, static_cast<std::uint32_t>(sample_rate));
  PutU32(out, static_cast<std::uint32_t>(sample_rate) * block_align);
  PutU16(out, block_align);
  PutU16(out, bits);
  if (!pcm16) {
    PutU16(out, 0);
    PutTag(out, "fact");
    PutU32(out, 4);
    PutU32(out, static_cast<std::uint32_t>(frames));
  }
  PutTag(out, "data");
  PutU32(out, data_bytes);
  for (std::size_t n = 0; n < frames; ++n) {
    for (const auto& c : channels) {
      if (pcm16) {
        const double scaled = std::round(std::clamp(c[n], -1.0, 1.0) * kPcm16Scale);
        PutU16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
      } else {
        PutU32(out, std::bit_cast<std::uint32_t>(static_cast<float>(c[n])));
      }
    }
  }
  return out;
}

void WriteWav(const std::filesystem::path& path, int sample_rate,
              std::span<const std::vector<double>> channels,
              WavEncoding encoding) {
  WriteFileAtomically(path, SerializeWav(sample_rate, channels, encoding));
}

FoaSignal ReadFoaWav(const std::filesystem::path& path) {
  WavData wav = ReadWav(path);
  if (wav.channels.size() != kNumFoaChannels) {
    throw Error(ErrorCode::kWavChannelCount,
                path.string() + ": expected 4 channels, found " +
                    std::to_string(wav.channels.size()));
  }
  FoaSignal::Channels channels;
  for (int c = 0; c < kNumFoaChannels; ++c) {
    channels[c] = std::move(wav.channels[c]);
  }
  return FoaSignal(wav.sample_rate, std::move(channels));
}

void WriteFoaWav(const std::filesystem::path& path, const FoaSignal& signal,
                 WavEncoding encoding) {
  WriteWav(path, signal.sample_rate(), signal.channels(), encoding);
}

std::vector<double> ReadMonoWav(const std::filesystem::path& path,
                                int* sample_rate) {
  WavData wav = ReadWav(path);
  if (wav.channels.size() != 1) {
    throw Error(ErrorCode::kWavChannelCount,
                path.string() + ": expected a mono file, found " +
                    std::to_string(wav.channels.size()) + " channels");
  }
  if (sample_rate) *sample_rate = wav.sample_rate;
  return std::move(wav.channels[0]);
}

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void WriteFileAtomically(const std::filesystem::path& path,
                         std::span<const std::uint8_t> bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(std::random_device{}());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kIo, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot rename into " + path.string());
  }
}

void WriteFileAtomically(const std::filesystem::path& path,
                         const std::string& text) {
  WriteFileAtomically(
      path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                      text.size()));
}

}  // namespace sfoa
