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

#include "ipitch/error.hpp"

namespace ipitch {

std::string_view error_category(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "usage.invalid_argument";
    case ErrorKind::InvalidConfig: return "usage.invalid_config";
    case ErrorKind::AudioTooShort: return "input.audio_too_short";
    case ErrorKind::UnstableLPC: return "numeric.unstable_lpc";
    case ErrorKind::InsufficientTokens: return "input.insufficient_tokens";
    case ErrorKind::TooUnvoiced: return "input.too_unvoiced";
    case ErrorKind::NoOverlap: return "input.no_overlap";
    case ErrorKind::DegenerateFeature: return "numeric.degenerate_feature";
    case ErrorKind::RequiresSingleSpeaker: return "input.requires_single_speaker";
    case ErrorKind::MissingStats: return "input.missing_stats";
    case ErrorKind::ShapeMismatch: return "numeric.shape_mismatch";
    case ErrorKind::NonScalarRoot: return "numeric.non_scalar_root";
    case ErrorKind::ZeroNormVector: return "numeric.zero_norm_vector";
    case ErrorKind::EmptyDataset: return "input.empty_dataset";
    case ErrorKind::NonFiniteLoss: return "numeric.non_finite_loss";
    case ErrorKind::ArchitectureMismatch: return "parse.architecture_mismatch";
    case ErrorKind::EmptyRecords: return "input.empty_records";
    case ErrorKind::MissingInput: return "io.missing_input";
    case ErrorKind::IoFailure: return "io.failure";
    case ErrorKind::ParseFailure: return "parse.malformed";
  }
  return "internal";
}

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::MissingInput:
    case ErrorKind::IoFailure:
      return 2;
    case ErrorKind::ParseFailure:
    case ErrorKind::ArchitectureMismatch:
    case ErrorKind::InvalidConfig:
    case ErrorKind::InvalidArgument:
    case ErrorKind::AudioTooShort:
    case ErrorKind::InsufficientTokens:
    case ErrorKind::TooUnvoiced:
    case ErrorKind::NoOverlap:
    case ErrorKind::RequiresSingleSpeaker:
    case ErrorKind::MissingStats:
    case ErrorKind::EmptyDataset:
    case ErrorKind::EmptyRecords:
      return 3;
    case ErrorKind::UnstableLPC:
    case ErrorKind::DegenerateFeature:
    case ErrorKind::ShapeMismatch:
    case ErrorKind::NonScalarRoot:
    case ErrorKind::ZeroNormVector:
    case ErrorKind::NonFiniteLoss:
      return 4;
  }
  return 1;
}

}  // namespace ipitch
