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

#include <filesystem>

#include <Eigen/Core>

namespace ipitch {

// Mono audio with samples in [-1, 1].
struct AudioBuffer {
  Eigen::VectorXd samples;
  int sample_rate = 16000;

  double duration() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// Throws InvalidArgument unless the buffer is non-empty, finite and at
// least 8 kHz.
void validate(const AudioBuffer& audio);

// RIFF/WAVE reader for mono 16-bit PCM and 32-bit IEEE float. Stereo and
// other encodings are rejected with ParseFailure.
AudioBuffer read_wav(const std::filesystem::path& path);

// Writes 16-bit PCM; samples are clipped to [-1, 1].
void write_wav(const std::filesystem::path& path, const AudioBuffer& audio);

}  // namespace ipitch
