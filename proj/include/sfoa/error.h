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

#ifndef SFOA_ERROR_H_
#define SFOA_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace sfoa {

// Every failure raised by the library carries one of these codes so callers
// (and the CLI) can distinguish them without parsing messages.
enum class ErrorCode {
  kInvalidArgument,
  kEmptyInput,
  kNonFinite,
  kShapeMismatch,
  kSampleRateMismatch,
  kWavChannelCount,
  kWavUnsupportedEncoding,
  kWavTruncated,
  kWavMalformed,
  kIo,
  kNotCola,
  kInsufficientData,
  kNoDirectionalEnergy,
  kMissingAudio,
  kTooManySources,
  kFormat,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sfoa

#endif  // SFOA_ERROR_H_
