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

#include "sfoa/error.h"

namespace sfoa {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kEmptyInput: return "empty_input";
    case ErrorCode::kNonFinite: return "non_finite";
    case ErrorCode::kShapeMismatch: return "shape_mismatch";
    case ErrorCode::kSampleRateMismatch: return "sample_rate_mismatch";
    case ErrorCode::kWavChannelCount: return "wav_channel_count";
    case ErrorCode::kWavUnsupportedEncoding: return "wav_unsupported_encoding";
    case ErrorCode::kWavTruncated: return "wav_truncated";
    case ErrorCode::kWavMalformed: return "wav_malformed";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kNotCola: return "not_cola";
    case ErrorCode::kInsufficientData: return "insufficient_data";
    case ErrorCode::kNoDirectionalEnergy: return "no_directional_energy";
    case ErrorCode::kMissingAudio: return "missing_audio";
    case ErrorCode::kTooManySources: return "too_many_sources";
    case ErrorCode::kFormat: return "format";
  }
  return "unknown";
}

}  // namespace sfoa
