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

#include "ipitch/corpus_synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <random>

#include "ipitch/error.hpp"

namespace ipitch {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t splitmix(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string padded(const char* prefix, int value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*d", prefix, width, value);
  return buf;
}

double gauss(std::mt19937_64& rng, double sd) {
  if (sd <= 0.0) return 0.0;
  return std::normal_distribution<double>(0.0, sd)(rng);
}

ContourPoints f0_shape(ContourShape shape, double level, double base, double magnitude, double declination,
                       double jitter, std::mt19937_64& rng) {
  ContourPoints out;
  for (int k = 0; k < kContourPoints; ++k) {
    const double u = (k + 1) / 10.0;
    double v = level;
    switch (shape) {
      case ContourShape::Flat: v -= declination * base * (u - 0.5); break;
      case ContourShape::Rise: v += magnitude * (u - 0.5); break;
      case ContourShape::Fall: v -= magnitude * (u - 0.5); break;
      case ContourShape::RiseFall: v += magnitude * (std::sin(std::numbers::pi * u) - 0.75); break;
    }
    v += gauss(rng, jitter * base);
    out[k] = std::clamp(v, 80.0, 290.0);
  }
  return out;
}

PhoneSegment make_segment(const std::string& pair_id, const SynthSpeaker& spk, const std::string& sentence,
                          int ordinal, const std::string& phone, Mode mode) {
  PhoneSegment s;
  s.segment_id = pair_id;
  s.speaker_id = spk.id;
  s.sentence_id = sentence;
  s.ordinal = ordinal;
  s.phone = phone;
  s.mode = mode;
  return s;
}

double lerp_knots(const Eigen::Ref<const Eigen::RowVectorXd>& knots, double frac) {
  const Eigen::Index n = knots.size();
  if (n == 1) return knots[0];
  const double pos = std::clamp(frac, 0.0, 1.0) * static_cast<double>(n - 1);
  const auto i = std::min<Eigen::Index>(static_cast<Eigen::Index>(pos), n - 2);
  const double w = pos - static_cast<double>(i);
  return (1.0 - w) * knots[i] + w * knots[i + 1];
}

}  // namespace

std::vector<VowelTarget> default_vowels() {
  return {
      {"a", {700.0, 1200.0, 2500.0}},
      {"ɛ", {550.0, 1800.0, 2500.0}},
      {"i", {300.0, 2300.0, 3000.0}},
      {"ɔ", {500.0, 850.0, 2500.0}},
      {"u", {320.0, 800.0, 2300.0}},
  };
}

std::string_view to_string(ContourShape s) {
  switch (s) {
    case ContourShape::Flat: return "flat";
    case ContourShape::Rise: return "rise";
    case ContourShape::Fall: return "fall";
    case ContourShape::RiseFall: return "rise_fall";
  }
  return "?";
}

void validate(const SynthConfig& cfg) {
  auto bad = [](const std::string& what) { fail(ErrorKind::InvalidConfig, "synth: " + what); };
  if (cfg.n_speakers < 1) bad("n_speakers must be >= 1");
  if (cfg.n_sentences_per_speaker < 1) bad("n_sentences_per_speaker must be >= 1");
  if (cfg.vowels_per_sentence < 1) bad("vowels_per_sentence must be >= 1");
  if (cfg.vowels.empty()) bad("vowel inventory is empty");
  for (const auto& v : cfg.vowels) {
    if (!(v.formants.array() > 0.0).all() || !(v.formants[0] < v.formants[1] && v.formants[1] < v.formants[2]))
      bad("vowel " + v.label + " needs increasing positive formants");
  }
  if (!cfg.whisper_shift.allFinite() || !(cfg.whisper_shift.array() >= 0.0).all()) bad("whisper_shift must be >= 0");
  if (!(cfg.whisper_noise_sd.array() >= 0.0).all()) bad("whisper_noise_sd must be >= 0");
  if (!(cfg.phonated_noise_sd >= 0.0)) bad("phonated_noise_sd must be >= 0");
  if (!(cfg.glide_fraction >= 0.0)) bad("glide_fraction must be >= 0");
  if (!(cfg.f0_base_male > 0.0 && cfg.f0_base_female > 0.0)) bad("f0 bases must be > 0");
  if (!(cfg.f0_base_sd >= 0.0 && cfg.f0_level_sd >= 0.0 && cfg.f0_jitter >= 0.0)) bad("f0 spreads must be >= 0");
  if (!(cfg.excursion_min >= 0.0 && cfg.excursion_max >= cfg.excursion_min)) bad("excursion range is invalid");
  if (!(cfg.declination >= 0.0)) bad("declination must be >= 0");
  if (!(cfg.coupling >= 0.0 && cfg.coupling <= 1.0)) bad("coupling must lie in [0, 1]");
  if (!(cfg.female_formant_scale > 0.0 && cfg.speaker_scale_sd >= 0.0)) bad("formant scaling is invalid");
}

SynthCorpus synth_paired_corpus(const SynthConfig& cfg) {
  validate(cfg);
  SynthCorpus corpus;
  std::vector<PhoneSegment> all_segments;
  for (int s = 0; s < cfg.n_speakers; ++s) {
    std::mt19937_64 rng(splitmix(cfg.seed ^ splitmix(static_cast<std::uint64_t>(s) + 1)));
    SynthSpeaker spk;
    spk.id = padded("spk", s + 1, 3);
    spk.female = s % 2 == 1;
    spk.formant_scale = (spk.female ? cfg.female_formant_scale : 1.0) * (1.0 + gauss(rng, cfg.speaker_scale_sd));
    spk.f0_base = std::max(85.0, (spk.female ? cfg.f0_base_female : cfg.f0_base_male) + gauss(rng, cfg.f0_base_sd));
    corpus.speakers.push_back(spk);

    std::uniform_int_distribution<int> pick_vowel(0, static_cast<int>(cfg.vowels.size()) - 1);
    std::uniform_int_distribution<int> pick_shape(0, 3);
    std::uniform_real_distribution<double> pick_mag(cfg.excursion_min, cfg.excursion_max);
    for (int n = 0; n < cfg.n_sentences_per_speaker; ++n) {
      const std::string sentence = padded("s", n + 1, 3);
      const double level = spk.f0_base * (1.0 + gauss(rng, cfg.f0_level_sd));
      for (int o = 1; o <= cfg.vowels_per_sentence; ++o) {
        const VowelTarget& vowel = cfg.vowels[static_cast<std::size_t>(pick_vowel(rng))];
        const auto shape = static_cast<ContourShape>(pick_shape(rng));
        const double magnitude = pick_mag(rng) * spk.f0_base;
        const ContourPoints f0 =
            f0_shape(shape, level, spk.f0_base, magnitude, cfg.declination, cfg.f0_jitter, rng);
        const double f0_mean = f0.mean();

        PairedPhone pair;
        pair.id = spk.id + "_" + sentence + "_" + std::to_string(o);
        pair.phonated = make_segment(pair.id, spk, sentence, o, vowel.label, Mode::Phonated);
        pair.whispered = make_segment(pair.id, spk, sentence, o, vowel.label, Mode::Whispered);
        pair.phonated.contours[Feature::F0] = {Feature::F0, f0, Space::Hz};
        for (int k = 0; k < 3; ++k) {
          const double target = vowel.formants[k] * spk.formant_scale;
          const double glide = gauss(rng, cfg.glide_fraction * target);
          ContourPoints ph, wh;
          for (int j = 0; j < kContourPoints; ++j) {
            const double u = (j + 1) / 10.0;
            ph[j] = target * (1.0 + cfg.coupling * (f0[j] - f0_mean) / spk.f0_base) + glide * (u - 0.5) +
                    gauss(rng, cfg.phonated_noise_sd);
            ph[j] = std::max(ph[j], 50.0);
            wh[j] = std::max(ph[j] + cfg.whisper_shift[k] + gauss(rng, cfg.whisper_noise_sd[k]), 50.0);
          }
          pair.phonated.contours[kFormants[k]] = {kFormants[k], ph, Space::Hz};
          pair.whispered.contours[kFormants[k]] = {kFormants[k], wh, Space::Hz};
        }
        all_segments.push_back(pair.phonated);
        all_segments.push_back(pair.whispered);
        corpus.pairs.push_back(std::move(pair));
        corpus.shapes.push_back(shape);
      }
    }
  }
  corpus.stats = fit_all_speaker_stats(all_segments);
  return corpus;
}

AudioBuffer synth_vowel_audio(const VowelAudioSpec& spec) {
  auto bad = [](const std::string& what) { fail(ErrorKind::InvalidConfig, "vowel audio: " + what); };
  if (spec.sample_rate < 8000) bad("sample_rate must be >= 8000");
  if (!(spec.duration_s > 0.0)) bad("duration_s must be > 0");
  if (spec.formant_tracks.rows() < 1 || spec.formant_tracks.cols() < 1) bad("formant_tracks is empty");
  if (spec.bandwidths.size() != spec.formant_tracks.rows()) bad("one bandwidth per formant required");
  if (!(spec.bandwidths.array() > 0.0).all()) bad("bandwidths must be > 0");
  const double nyquist = spec.sample_rate / 2.0;
  if (!(spec.formant_tracks.array() > 0.0).all() || !(spec.formant_tracks.array() < nyquist).all())
    bad("formants must lie in (0, nyquist)");
  if (!spec.whispered) {
    if (spec.f0_track.size() < 1) bad("voiced audio needs an f0 track");
    if (!(spec.f0_track.array() >= 75.0).all() || !(spec.f0_track.array() <= 300.0).all())
      bad("voiced f0 must lie in [75, 300] Hz");
  }
  if (!(spec.whisper_bandwidth_scale > 0.0) || !(spec.peak_amplitude > 0.0)) bad("scales must be > 0");

  const auto n = static_cast<Eigen::Index>(std::llround(spec.duration_s * spec.sample_rate));
  if (n < 1) bad("duration shorter than one sample");
  const double dt = 1.0 / spec.sample_rate;
  std::mt19937_64 rng(splitmix(spec.seed));
  std::normal_distribution<double> unit(0.0, 1.0);

  Eigen::VectorXd x(n);
  double phase = 0.0;
  const Eigen::RowVectorXd f0_knots = spec.f0_track.transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (spec.whispered) {
      x[i] = unit(rng);
      continue;
    }
    const double frac = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
    const double f0 = lerp_knots(f0_knots, frac);
    phase += 2.0 * std::numbers::pi * f0 * dt;
    if (phase > 2.0 * std::numbers::pi) phase -= 2.0 * std::numbers::pi;
    const int harmonics = std::max(1, static_cast<int>(0.45 * spec.sample_rate / f0));
    // Chebyshev recurrence for cos(h * phase).
    const double c1 = std::cos(phase);
    double prev = 1.0, cur = c1, sum = 0.0;
    for (int h = 1; h <= harmonics; ++h) {
      sum += cur / h;
      const double next = 2.0 * c1 * cur - prev;
      prev = cur;
      cur = next;
    }
    x[i] = sum + 1e-3 * unit(rng);
  }

  const Eigen::Index formants = spec.formant_tracks.rows();
  const double bw_scale = spec.whispered ? spec.whisper_bandwidth_scale : 1.0;
  for (Eigen::Index f = 0; f < formants; ++f) {
    double y1 = 0.0, y2 = 0.0;
    const Eigen::RowVectorXd knots = spec.formant_tracks.row(f);
    const double bw = spec.bandwidths[f] * bw_scale;
    const double c = -std::exp(-2.0 * std::numbers::pi * bw * dt);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double frac = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
      const double freq = lerp_knots(knots, frac);
      const double b = 2.0 * std::exp(-std::numbers::pi * bw * dt) * std::cos(2.0 * std::numbers::pi * freq * dt);
      const double a = 1.0 - b - c;
      const double y = a * x[i] + b * y1 + c * y2;
      y2 = y1;
      y1 = y;
      x[i] = y;
    }
  }

  // Lip radiation for the noise source; the harmonic source already carries it.
  if (spec.whispered)
    for (Eigen::Index i = n - 1; i >= 1; --i) x[i] -= x[i - 1];

  const double peak = x.cwiseAbs().maxCoeff();
  if (peak > 0.0) x *= spec.peak_amplitude / peak;
  return AudioBuffer{std::move(x), spec.sample_rate};
}

VowelAudioSpec steady_vowel(const Eigen::Vector3d& formants, Eigen::VectorXd f0_track, double duration_s,
                            int sample_rate) {
  VowelAudioSpec spec;
  const double nyquist = sample_rate / 2.0;
  std::vector<double> freqs{formants[0], formants[1], formants[2]};
  std::vector<double> bws{60.0, 90.0, 120.0};
  // Fixed upper resonances so the LPC order has something to model.
  for (double extra : {1000.0, 2000.0}) {
    if (formants[2] + extra < nyquist - 500.0) {
      freqs.push_back(formants[2] + extra);
      bws.push_back(150.0 + extra / 10.0);
    }
  }
  spec.formant_tracks = Eigen::Map<Eigen::VectorXd>(freqs.data(), static_cast<Eigen::Index>(freqs.size()));
  spec.bandwidths = Eigen::Map<Eigen::VectorXd>(bws.data(), static_cast<Eigen::Index>(bws.size()));
  spec.f0_track = std::move(f0_track);
  spec.duration_s = duration_s;
  spec.sample_rate = sample_rate;
  return spec;
}

RenderedCorpus render_corpus_audio(const SynthCorpus& corpus, int sample_rate, double token_s, std::uint64_t seed) {
  if (!(token_s >= 0.1)) fail(ErrorKind::InvalidConfig, "render: token duration must be >= 0.1 s");
  if (sample_rate < 8000) fail(ErrorKind::InvalidConfig, "render: sample_rate must be >= 8000");
  constexpr double kLead = 0.1;
  constexpr double kGap = 0.08;

  // Contour points sit at 10%..90%; hold the end values out to the edges.
  auto knots = [](const ContourPoints& p) {
    Eigen::RowVectorXd k(kContourPoints + 2);
    k[0] = p[0];
    k.segment(1, kContourPoints) = p.transpose();
    k[kContourPoints + 1] = p[kContourPoints - 1];
    return k;
  };

  RenderedCorpus out;
  for (const auto& spk : corpus.speakers) out.speaker_sex.emplace_back(spk.id, spk.female);

  std::map<std::pair<std::string, std::string>, std::vector<const PairedPhone*>> sentences;
  for (const auto& p : corpus.pairs) sentences[{p.phonated.speaker_id, p.phonated.sentence_id}].push_back(&p);

  std::uint64_t token_seed = splitmix(seed);
  for (auto& [key, tokens] : sentences) {
    std::sort(tokens.begin(), tokens.end(),
              [](const PairedPhone* a, const PairedPhone* b) { return a->phonated.ordinal < b->phonated.ordinal; });
    for (Mode mode : {Mode::Phonated, Mode::Whispered}) {
      const std::string file = key.first + "_" + key.second + "_" + std::string(to_string(mode)) + ".wav";
      const auto lead = static_cast<Eigen::Index>(std::llround(kLead * sample_rate));
      const auto gap = static_cast<Eigen::Index>(std::llround(kGap * sample_rate));
      const auto len = static_cast<Eigen::Index>(std::llround(token_s * sample_rate));
      const auto count = static_cast<Eigen::Index>(tokens.size());
      Eigen::VectorXd samples = Eigen::VectorXd::Zero(2 * lead + count * len + (count - 1) * gap);
      Eigen::Index cursor = lead;
      for (const PairedPhone* pair : tokens) {
        const PhoneSegment& seg = mode == Mode::Phonated ? pair->phonated : pair->whispered;
        Eigen::Vector3d mid;
        for (int k = 0; k < 3; ++k) mid[k] = seg.contour(kFormants[k]).points[4];
        Eigen::VectorXd f0 = Eigen::VectorXd::Constant(1, 120.0);
        if (mode == Mode::Phonated) f0 = knots(pair->phonated.contour(Feature::F0).points).transpose();
        VowelAudioSpec spec = steady_vowel(mid, f0, static_cast<double>(len) / sample_rate, sample_rate);
        spec.formant_tracks.resize(spec.bandwidths.size(), kContourPoints + 2);
        for (int k = 0; k < 3; ++k) spec.formant_tracks.row(k) = knots(seg.contour(kFormants[k]).points);
        for (Eigen::Index f = 3; f < spec.bandwidths.size(); ++f)
          spec.formant_tracks.row(f).setConstant(mid[2] + 1000.0 * static_cast<double>(f - 2));
        spec.whispered = mode == Mode::Whispered;
        token_seed = splitmix(token_seed);
        spec.seed = token_seed;
        const AudioBuffer token = synth_vowel_audio(spec);
        samples.segment(cursor, len) = token.samples;

        AlignmentRow row;
        row.file = file;
        row.speaker = seg.speaker_id;
        row.sentence_id = seg.sentence_id;
        row.ordinal = seg.ordinal;
        row.phone = seg.phone;
        row.mode = mode;
        row.start_s = static_cast<double>(cursor) / sample_rate;
        row.end_s = static_cast<double>(cursor + len) / sample_rate;
        out.alignment.push_back(row);
        cursor += len + gap;
      }
      out.files.push_back({file, AudioBuffer{std::move(samples), sample_rate}});
    }
  }
  return out;
}

}  // namespace ipitch
