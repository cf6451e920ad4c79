// Copyright 2026 The Staircase-PIR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace spir {

enum class ErrorCode : std::uint64_t {
  kInvalidArgument = 1,
  kNotPrime,
  kDivisionByZero,
  kFieldMismatch,
  kDuplicatePoint,
  kZeroPoint,
  kDimensionMismatch,
  kSingular,
  kInvalidThreshold,
  kInvalidK,
  kFieldTooSmall,
  kFileIndexOutOfRange,
  kBadEncodingMatrix,
  kOutOfRange,
  kInsufficientResponders,
  kNotEnoughShares,
  kColumnOutOfRange,
  kMissingResponse,
  kSearchSpaceTooLarge,
  kHandshakeMismatch,
  kTimeout,
  kMalformedFrame,
  kIoError,
  kSessionConsumed,
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNotPrime: return "NotPrime";
    case ErrorCode::kDivisionByZero: return "DivisionByZero";
    case ErrorCode::kFieldMismatch: return "FieldMismatch";
    case ErrorCode::kDuplicatePoint: return "DuplicatePoint";
    case ErrorCode::kZeroPoint: return "ZeroPoint";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kSingular: return "Singular";
    case ErrorCode::kInvalidThreshold: return "InvalidThreshold";
    case ErrorCode::kInvalidK: return "InvalidK";
    case ErrorCode::kFieldTooSmall: return "FieldTooSmall";
    case ErrorCode::kFileIndexOutOfRange: return "FileIndexOutOfRange";
    case ErrorCode::kBadEncodingMatrix: return "BadEncodingMatrix";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kInsufficientResponders: return "InsufficientResponders";
    case ErrorCode::kNotEnoughShares: return "NotEnoughShares";
    case ErrorCode::kColumnOutOfRange: return "ColumnOutOfRange";
    case ErrorCode::kMissingResponse: return "MissingResponse";
    case ErrorCode::kSearchSpaceTooLarge: return "SearchSpaceTooLarge";
    case ErrorCode::kHandshakeMismatch: return "HandshakeMismatch";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kMalformedFrame: return "MalformedFrame";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kSessionConsumed: return "SessionConsumed";
  }
  return "Unknown";
}

/// Every failure in the library is reported as an `Error` carrying a code,
/// so callers can branch on the code and still print a readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace spir
