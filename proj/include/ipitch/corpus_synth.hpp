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

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ipitch/audio.hpp"
#include "ipitch/contour.hpp"

namespace ipitch {

struct VowelTarget {
  std::string label;
  Eigen::Vector3d formants;  // F1 < F2 < F3, Hz
};

// a, ɛ, i, ɔ, u with adult-male reference formants.
std::vector<VowelTarget> default_vowels();

enum class ContourShape { Flat, Rise, Fall, RiseFall };

std::string_view to_string(ContourShape s);

// Contour-level generator settings. The coupling term makes every formant
// move proportionally with the f0 excursion: dF/F = coupling * df0/f0_base.
struct SynthConfig {
  int n_speakers = 20;
  int n_sentences_per_speaker = 20;
  int vowels_per_sentence = 5;
  std::vector<VowelTarget> vowels = default_vowels();
  Eigen::Vector3d whisper_shift{200.0, 100.0, 30.0};
  Eigen::Vector3d whisper_noise_sd{60.0, 60.0, 60.0};
  double phonated_noise_sd = 8.0;
  // Per-token linear formant glide, sd as a fraction of the formant target.
  double glide_fraction = 0.03;
  double f0_base_male = 115.0;
  double f0_base_female = 210.0;
  double f0_base_sd = 10.0;
  // Per-sentence f0 level jitter, fraction of the speaker base.
  double f0_level_sd = 0.05;
  // Rise / fall / rise-fall excursion range, fraction of the speaker base.
  double excursion_min = 0.15;
  double excursion_max = 0.35;
  // Total fall across a "flat" token, fraction of the speaker base.
  double declination = 0.05;
  double f0_jitter = 0.005;
  double coupling = 0.3;
  double female_formant_scale = 1.15;
  double speaker_scale_sd = 0.03;
  std::uint64_t seed = 1;
};

// Throws InvalidConfig.
void validate(const SynthConfig& cfg);

struct SynthSpeaker {
  std::string id;
  bool female = false;
  double formant_scale = 1.0;
  double f0_base = 120.0;
};

struct SynthCorpus {
  std::vector<PairedPhone> pairs;  // hz space, sorted by id
  StatsTable stats;
  std::vector<SynthSpeaker> speakers;
  std::vector<ContourShape> shapes;  // per pair
};

// Deterministic per seed; each speaker draws from its own derived stream.
SynthCorpus synth_paired_corpus(const SynthConfig& cfg);

// --- audio -------------------------------------------------------------------

// Source-filter vowel: harmonic pulse source (or white noise when
// whispered) through cascaded two-pole resonators. Tracks are knot values
// spread evenly over the duration and interpolated linearly.
struct VowelAudioSpec {
  Eigen::MatrixXd formant_tracks;  // formants x knots, Hz
  Eigen::VectorXd bandwidths;      // per formant, Hz
  Eigen::VectorXd f0_track;        // knots, Hz; unused when whispered
  double duration_s = 0.5;
  int sample_rate = 16000;
  bool whispered = false;
  // Whispered resonances are broader by this factor.
  double whisper_bandwidth_scale = 4.0;
  double peak_amplitude = 0.5;
  std::uint64_t seed = 1;
};

// Throws InvalidConfig on empty tracks, rates below 8 kHz, resonances
// above Nyquist or voiced f0 outside [75, 300] Hz.
AudioBuffer synth_vowel_audio(const VowelAudioSpec& spec);

// Steady vowel with default bandwidths 60/90/120 Hz.
VowelAudioSpec steady_vowel(const Eigen::Vector3d& formants, Eigen::VectorXd f0_track, double duration_s,
                            int sample_rate = 16000);

struct RenderedFile {
  std::string file;
  AudioBuffer audio;
};

struct RenderedCorpus {
  std::vector<RenderedFile> files;
  std::vector<AlignmentRow> alignment;
  std::vector<std::pair<std::string, bool>> speaker_sex;  // (speaker, female)
};

// One WAV per (speaker, sentence, mode): the sentence's vowel tokens with
// their contour trajectories, separated by short silences.
RenderedCorpus render_corpus_audio(const SynthCorpus& corpus, int sample_rate, double token_s, std::uint64_t seed);

}  // namespace ipitch
