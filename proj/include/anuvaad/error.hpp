// Copyright 2026 The Anuvaad Authors
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

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace anuvaad {

enum class ErrorCode {
  kIoFailure,
  kMalformedRecord,
  kDuplicateId,
  kBadMagic,
  kUnsupportedVersion,
  kChecksumMismatch,
  kTruncated,
  kDimensionMismatch,
  kIdMismatch,
  kNonFiniteValue,
  kZeroNormRow,
  kKTooLarge,
  kScoreOutOfRange,
  kBadEdges,
  kInvalidSpec,
  kDanglingIndex,
  kLengthMismatch,
  kEmptyCorpus,
  kEmptyReferenceCorpus,
  kCorpusTooSmall,
  kInvalidUtf8,
  kInvalidArgument,
  kInvalidConfig,
};

inline constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kMalformedRecord: return "MalformedRecord";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kUnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::kChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::kTruncated: return "Truncated";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kIdMismatch: return "IdMismatch";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kZeroNormRow: return "ZeroNormRow";
    case ErrorCode::kKTooLarge: return "KTooLarge";
    case ErrorCode::kScoreOutOfRange: return "ScoreOutOfRange";
    case ErrorCode::kBadEdges: return "BadEdges";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kDanglingIndex: return "DanglingIndex";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kEmptyReferenceCorpus: return "EmptyReferenceCorpus";
    case ErrorCode::kCorpusTooSmall: return "CorpusTooSmall";
    case ErrorCode::kInvalidUtf8: return "InvalidUtf8";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

/// Exception thrown by every fallible operation in the library.
///
/// `row()` / `col()` carry the location the error refers to when there is
/// one: the 1-based line number for MalformedRecord, the matrix row for
/// IdMismatch / NonFiniteValue / ZeroNormRow, and so on. `key()` carries
/// an offending identifier (DuplicateId) or path (IoFailure).
class Error : public std::runtime_error {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  Error(ErrorCode code, const std::string& message, std::size_t row = npos,
        std::size_t col = npos, std::string key = {})
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        row_(row),
        col_(col),
        key_(std::move(key)) {}

  ErrorCode code() const noexcept { return code_; }
  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }
  const std::string& key() const noexcept { return key_; }

 private:
  ErrorCode code_;
  std::size_t row_;
  std::size_t col_;
  std::string key_;
};

}  // namespace anuvaad
