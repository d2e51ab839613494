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

#include <vector>

#include "ipitch/contour.hpp"
#include "ipitch/corpus_synth.hpp"

namespace ipitch::testing {

inline SynthConfig small_corpus(int speakers, int sentences, std::uint64_t seed = 1) {
  SynthConfig cfg;
  cfg.n_speakers = speakers;
  cfg.n_sentences_per_speaker = sentences;
  cfg.seed = seed;
  return cfg;
}

inline std::vector<PairedPhone> normalized_pairs(const SynthCorpus& corpus) {
  std::vector<PairedPhone> out;
  for (const auto& p : corpus.pairs) out.push_back(normalize(p, corpus.stats));
  return out;
}

}  // namespace ipitch::testing
