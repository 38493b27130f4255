// Copyright 2026 The LDHD Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LDHD_ERROR_H_
#define LDHD_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace ldhd {

enum class ErrorCode {
  kDimensionMismatch,
  kInvalidArgument,
  kNotOrthonormal,
  kNotIndependent,
  kNotInSpan,
  kInfeasible,
  kRankTolerance,
  kTooLarge,
  kIllConditioned,
  kDiverged,
  kInvalidScale,
  kParseError,
  kWindowExceeded,
  kIo,
};

inline std::string_view ErrorCodeName(ErrorCode code);

// All library failures surface as this exception; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNotOrthonormal: return "NotOrthonormal";
    case ErrorCode::kNotIndependent: return "NotIndependent";
    case ErrorCode::kNotInSpan: return "NotInSpan";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kRankTolerance: return "RankTolerance";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kIllConditioned: return "IllConditioned";
    case ErrorCode::kDiverged: return "Diverged";
    case ErrorCode::kInvalidScale: return "InvalidScale";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kWindowExceeded: return "WindowExceeded";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace ldhd

#endif  // LDHD_ERROR_H_
