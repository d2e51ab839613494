// Copyright 2026 The ipitch Authors.
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

#include <stdexcept>
#include <string>
#include <string_view>

namespace ipitch {

enum class ErrorKind {
  InvalidArgument,
  InvalidConfig,
  AudioTooShort,
  UnstableLPC,
  InsufficientTokens,
  TooUnvoiced,
  NoOverlap,
  DegenerateFeature,
  RequiresSingleSpeaker,
  MissingStats,
  ShapeMismatch,
  NonScalarRoot,
  ZeroNormVector,
  EmptyDataset,
  NonFiniteLoss,
  ArchitectureMismatch,
  EmptyRecords,
  MissingInput,
  IoFailure,
  ParseFailure,
};

// Machine-readable category, e.g. "io.missing_input" or "numeric.unstable_lpc".
std::string_view error_category(ErrorKind kind) noexcept;

// Process exit code for the CLI: 2 I/O, 3 parse or unusable input, 4 numerical.
int exit_code_for(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace ipitch
