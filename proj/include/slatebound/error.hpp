// Copyright 2026 The Slatebound Authors.
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

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace slatebound {

enum class ErrorCode {
  kPositionOutOfRange,
  kDuplicateItem,
  kInvalidPool,
  kInvalidRules,
  kInvalidSlate,
  kDimensionMismatch,
  kLengthMismatch,
  kFeasibleSetTooLarge,
  kInvalidScenario,
  kParse,
  kSchema,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kPositionOutOfRange: return "PositionOutOfRange";
    case ErrorCode::kDuplicateItem: return "DuplicateItem";
    case ErrorCode::kInvalidPool: return "InvalidPool";
    case ErrorCode::kInvalidRules: return "InvalidRules";
    case ErrorCode::kInvalidSlate: return "InvalidSlate";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kFeasibleSetTooLarge: return "FeasibleSetTooLarge";
    case ErrorCode::kInvalidScenario: return "InvalidScenario";
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kSchema: return "Schema";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the oracle when the predicted feasible-set size exceeds the
// configured safety limit.
class FeasibleSetTooLarge : public Error {
 public:
  FeasibleSetTooLarge(std::uint64_t predicted, std::uint64_t limit)
      : Error(ErrorCode::kFeasibleSetTooLarge,
              "predicted |F| = " + std::to_string(predicted) +
                  " exceeds limit " + std::to_string(limit)),
        predicted_(predicted),
        limit_(limit) {}

  std::uint64_t predicted() const noexcept { return predicted_; }
  std::uint64_t limit() const noexcept { return limit_; }

 private:
  std::uint64_t predicted_;
  std::uint64_t limit_;
};

// Input text could not be parsed; `line` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorCode::kParse,
              (line ? "line " + std::to_string(line) + ": " : std::string()) +
                  what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace slatebound
