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

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <unistd.h>
#include <numbers>
#include <random>

#include <Eigen/QR>
#include <gtest/gtest.h>

#include "ipitch/audio.hpp"
#include "ipitch/corpus_synth.hpp"
#include "ipitch/error.hpp"
#include "ipitch/signal_analysis.hpp"

namespace ipitch {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kRate = 16000;

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no ipitch::Error thrown";
  return ErrorKind::ParseFailure;
}

AudioBuffer harmonic_complex(double f0, int harmonics, double seconds, int rate = kRate) {
  const auto n = static_cast<Eigen::Index>(seconds * rate);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int h = 1; h <= harmonics; ++h) x[i] += std::sin(2.0 * kPi * h * f0 * i / rate) / h;
  return {0.5 * x / x.cwiseAbs().maxCoeff(), rate};
}

AudioBuffer white_noise(double seconds, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 0.2);
  Eigen::VectorXd x(static_cast<Eigen::Index>(seconds * kRate));
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = n(rng);
  return {x, kRate};
}

// Frames whose analysis window (2 x window_length wide) stays `margin`
// seconds clear of both ends.
std::vector<Eigen::Index> steady_frames(const FrameTrack& t, double duration, double margin = 0.06) {
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = 0; i < t.frames(); ++i)
    if (t.times[static_cast<std::size_t>(i)] > margin && t.times[static_cast<std::size_t>(i)] < duration - margin)
      out.push_back(i);
  return out;
}

// --- pre-emphasis ----------------------------------------------------------

TEST(Preemphasis, ConstantSignalScalesByOneMinusAlpha) {
  const AudioBuffer x{Eigen::VectorXd::Constant(400, 0.3), kRate};
  const double alpha = std::exp(-2.0 * kPi * 50.0 / kRate);
  const AudioBuffer y = preemphasize(x, 50.0);
  for (Eigen::Index i = 0; i < y.samples.size(); ++i) EXPECT_NEAR(y.samples[i], 0.3 * (1.0 - alpha), 1e-15);
}

TEST(Preemphasis, ZeroCornerIsFirstDifference) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd s(100);
  for (Eigen::Index i = 0; i < s.size(); ++i) s[i] = u(rng);
  const AudioBuffer y = preemphasize({s, kRate}, 0.0);
  EXPECT_EQ(y.samples[0], 0.0);
  for (Eigen::Index i = 1; i < s.size(); ++i) EXPECT_EQ(y.samples[i], s[i] - s[i - 1]);
}

TEST(Preemphasis, SinusoidGainMatchesAnalyticResponse) {
  const double f = 150.0, w = 2.0 * kPi * f / kRate, alpha = std::exp(-2.0 * kPi * 50.0 / kRate);
  const double gain = std::abs(1.0 - alpha * std::exp(std::complex<double>(0.0, -w)));
  Eigen::VectorXd s(kRate);
  for (Eigen::Index i = 0; i < s.size(); ++i) s[i] = std::sin(w * i);
  const AudioBuffer y = preemphasize({s, kRate}, 50.0);
  // Least-squares fit of a sin + b cos at the same frequency past the first sample.
  Eigen::MatrixXd basis(s.size() - 1, 2);
  for (Eigen::Index i = 1; i < s.size(); ++i) basis.row(i - 1) << std::sin(w * i), std::cos(w * i);
  const Eigen::Vector2d ab = basis.colPivHouseholderQr().solve(y.samples.tail(s.size() - 1));
  EXPECT_NEAR(ab.norm(), gain, 1e-6);
}

TEST(Preemphasis, IsLinearInTheInput) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::VectorXd s(512);
  for (Eigen::Index i = 0; i < s.size(); ++i) s[i] = n(rng);
  for (double a : {-3.0, 0.5, 7.25}) {
    const Eigen::VectorXd lhs = preemphasize({a * s, kRate}, 50.0).samples;
    const Eigen::VectorXd rhs = a * preemphasize({s, kRate}, 50.0).samples;
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-14 * std::abs(a) * 8.0);
  }
}

// --- pitch -------------------------------------------------------------------

TEST(Pitch, HarmonicComplexAt150Hz) {
  const FrameTrack t = extract_pitch(harmonic_complex(150.0, 3, 1.0), AnalysisConfig{});
  int voiced = 0;
  for (Eigen::Index i = 0; i < t.frames(); ++i) {
    if (!t.defined(i, 0)) continue;
    ++voiced;
    EXPECT_NEAR(t.values(i, 0), 150.0, 1.0) << "frame " << i;
  }
  EXPECT_GT(voiced, t.frames() * 9 / 10);
}

TEST(Pitch, TimeGridIsUniformAtTenMilliseconds) {
  const FrameTrack t = extract_pitch(harmonic_complex(150.0, 3, 0.5), AnalysisConfig{});
  ASSERT_GT(t.frames(), 2);
  for (std::size_t i = 1; i < t.times.size(); ++i) EXPECT_NEAR(t.times[i] - t.times[i - 1], 0.01, 1e-12);
}

TEST(Pitch, WhiteNoiseIsMostlyUnvoiced) {
  const FrameTrack t = extract_pitch(white_noise(1.0, 3), AnalysisConfig{});
  const auto unvoiced = (!t.defined.col(0)).count();
  EXPECT_GE(unvoiced, t.frames() * 9 / 10);
}

TEST(Pitch, LowToneIsNotHalvedBelowTheFloor) {
  const FrameTrack t = extract_pitch(harmonic_complex(80.0, 1, 1.0), AnalysisConfig{});
  int voiced = 0;
  for (Eigen::Index i = 0; i < t.frames(); ++i) {
    if (!t.defined(i, 0)) continue;
    ++voiced;
    EXPECT_NEAR(t.values(i, 0), 80.0, 1.0);
  }
  EXPECT_GT(voiced, 0);
}

TEST(Pitch, VoicedValuesStayInsideTheSearchRange) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> f0(60.0, 340.0);
  const AnalysisConfig cfg;
  for (int trial = 0; trial < 12; ++trial) {
    const AudioBuffer a = trial % 4 == 3 ? white_noise(0.5, trial) : harmonic_complex(f0(rng), 1 + trial % 5, 0.5);
    const FrameTrack t = extract_pitch(a, cfg);
    for (Eigen::Index i = 0; i < t.frames(); ++i) {
      if (!t.defined(i, 0)) continue;
      EXPECT_GE(t.values(i, 0), cfg.pitch_floor);
      EXPECT_LE(t.values(i, 0), cfg.pitch_ceiling);
    }
  }
}

TEST(Pitch, TooShortAudioThrows) {
  EXPECT_EQ(kind_of([] { extract_pitch(harmonic_complex(150.0, 3, 0.03), AnalysisConfig{}); }),
            ErrorKind::AudioTooShort);
}

TEST(Pitch, SynthesizedGlideEndpoints) {
  Eigen::VectorXd f0(2);
  f0 << 120.0, 180.0;
  const double duration = 1.0;
  const AudioBuffer a = synth_vowel_audio(steady_vowel({700.0, 1200.0, 2500.0}, f0, duration));
  const FrameTrack t = extract_pitch(a, AnalysisConfig{});
  // Expected f0 at a frame centre follows the linear glide.
  Eigen::Index first = -1, last = -1;
  for (Eigen::Index i = 0; i < t.frames(); ++i)
    if (t.defined(i, 0)) {
      if (first < 0) first = i;
      last = i;
    }
  ASSERT_GE(first, 0);
  for (Eigen::Index i : {first, last}) {
    const double expected = 120.0 + 60.0 * t.times[static_cast<std::size_t>(i)] / duration;
    EXPECT_NEAR(t.values(i, 0), expected, 2.0) << "t = " << t.times[static_cast<std::size_t>(i)];
  }
  // Extrapolating the glide to the ends of the file recovers the endpoints.
  const double t0 = t.times[static_cast<std::size_t>(first)], t1 = t.times[static_cast<std::size_t>(last)];
  const double slope = (t.values(last, 0) - t.values(first, 0)) / (t1 - t0);
  EXPECT_NEAR(t.values(first, 0) - slope * t0, 120.0, 2.0);
  EXPECT_NEAR(t.values(last, 0) + slope * (duration - t1), 180.0, 2.0);
}

// --- formants ----------------------------------------------------------------

TEST(Formants, ThreeResonanceVowelWithinTwentyHertz) {
  const double duration = 0.5;
  const VowelAudioSpec spec = steady_vowel({500.0, 1500.0, 2500.0}, Eigen::VectorXd::Constant(1, 100.0), duration);
  ASSERT_EQ(spec.bandwidths.head(3), Eigen::Vector3d(60.0, 90.0, 120.0));
  const AudioBuffer a = synth_vowel_audio(spec);
  const FrameTrack t = extract_formants(a, 5000.0, AnalysisConfig{});
  const double truth[] = {500.0, 1500.0, 2500.0};
  const auto frames = steady_frames(t, duration);
  ASSERT_FALSE(frames.empty());
  for (Eigen::Index i : frames)
    for (int k = 0; k < 3; ++k) {
      ASSERT_TRUE(t.defined(i, k)) << "frame " << i << " slot " << k;
      EXPECT_NEAR(t.values(i, k), truth[k], 20.0) << "frame " << i << " F" << k + 1;
    }
}

TEST(Formants, OpenVowelWithUpperResonancesWithinTwentyHertz) {
  const double duration = 0.5;
  const AudioBuffer a =
      synth_vowel_audio(steady_vowel({700.0, 1200.0, 2500.0}, Eigen::VectorXd::Constant(1, 100.0), duration));
  const FrameTrack t = extract_formants(a, 5000.0, AnalysisConfig{});
  const double truth[] = {700.0, 1200.0, 2500.0};
  for (Eigen::Index i : steady_frames(t, duration))
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(t.values(i, k), truth[k], 20.0) << "frame " << i << " F" << k + 1;
}

TEST(Formants, SingleResonanceWithMatchedOrder) {
  VowelAudioSpec spec;
  spec.formant_tracks = Eigen::VectorXd::Constant(1, 700.0);
  spec.bandwidths = Eigen::VectorXd::Constant(1, 60.0);
  spec.f0_track = Eigen::VectorXd::Constant(1, 100.0);
  AnalysisConfig cfg;
  cfg.max_formants = 3;
  const AudioBuffer a = synth_vowel_audio(spec);
  const FrameTrack t = extract_formants(a, 5000.0, cfg);
  for (Eigen::Index i : steady_frames(t, spec.duration_s)) {
    ASSERT_TRUE(t.defined(i, 0));
    EXPECT_NEAR(t.values(i, 0), 700.0, 20.0);
    for (Eigen::Index k = 1; k < t.slots(); ++k)
      if (t.defined(i, k)) EXPECT_GT(t.values(i, k), t.values(i, 0));
  }
}

TEST(Formants, SilenceNeverYieldsNaN) {
  const AudioBuffer silence{Eigen::VectorXd::Zero(8000), kRate};
  try {
    const FrameTrack t = extract_formants(silence, 5000.0, AnalysisConfig{});
    for (Eigen::Index i = 0; i < t.values.size(); ++i) EXPECT_TRUE(std::isfinite(t.values.data()[i]));
    EXPECT_EQ(t.defined.count(), 0);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnstableLPC);
  }
}

TEST(Formants, FramesAreAscendingAndInsideTheMargins) {
  const AnalysisConfig cfg;
  for (int seed = 0; seed < 6; ++seed) {
    const double ceiling = 4500.0 + 250.0 * seed;
    const AudioBuffer a = seed % 3 == 2 ? white_noise(0.4, seed)
                                        : synth_vowel_audio(steady_vowel({300.0 + 60.0 * seed, 1100.0 + 150.0 * seed,
                                                                          2500.0},
                                                                         Eigen::VectorXd::Constant(1, 110.0), 0.4));
    const FrameTrack t = extract_formants(a, ceiling, cfg);
    EXPECT_EQ(t.slots(), cfg.max_formants);
    for (Eigen::Index i = 0; i < t.frames(); ++i) {
      double prev = 0.0;
      for (Eigen::Index k = 0; k < t.slots(); ++k) {
        if (!t.defined(i, k)) {
          for (Eigen::Index r = k; r < t.slots(); ++r) EXPECT_FALSE(t.defined(i, r));
          break;
        }
        EXPECT_GT(t.values(i, k), prev);
        EXPECT_GT(t.values(i, k), cfg.formant_margin);
        EXPECT_LT(t.values(i, k), ceiling - cfg.formant_margin);
        prev = t.values(i, k);
      }
    }
  }
}

TEST(Formants, CeilingAboveNyquistIsRejected) {
  const AudioBuffer a = harmonic_complex(120.0, 10, 0.3);
  EXPECT_EQ(kind_of([&] { extract_formants(a, 9000.0, AnalysisConfig{}); }), ErrorKind::InvalidArgument);
}

// --- Burg / roots / resampling ---------------------------------------------

TEST(Burg, RecoversArCoefficients) {
  // Stable AR(4): poles at 0.98 e^{+-i 0.4} and 0.97 e^{+-i 1.5}.
  const std::complex<double> p1 = std::polar(0.98, 0.4), p2 = std::polar(0.97, 1.5);
  const std::complex<double> roots[] = {p1, std::conj(p1), p2, std::conj(p2)};
  std::vector<std::complex<double>> poly{1.0};
  for (const auto& r : roots) {
    std::vector<std::complex<double>> next(poly.size() + 1, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i] += poly[i];
      next[i + 1] -= r * poly[i];
    }
    poly = next;
  }
  Eigen::VectorXd a(4);
  for (int k = 0; k < 4; ++k) a[k] = poly[static_cast<std::size_t>(k) + 1].real();

  for (int seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(50 + seed);
    std::normal_distribution<double> e(0.0, 1.0);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(10000 + 500);
    for (Eigen::Index n = 0; n < x.size(); ++n) {
      double v = e(rng);
      for (int k = 0; k < 4; ++k)
        if (n - 1 - k >= 0) v -= a[k] * x[n - 1 - k];
      x[n] = v;
    }
    const Eigen::VectorXd y = x.tail(10000);
    const Eigen::VectorXd est = burg_lpc(y, 4);
    EXPECT_LT((est - a).norm() / a.norm(), 1e-2) << "seed " << seed;
    // Covariance-method least squares on the same samples.
    Eigen::MatrixXd design(y.size() - 4, 4);
    for (Eigen::Index n = 4; n < y.size(); ++n)
      for (int k = 0; k < 4; ++k) design(n - 4, k) = -y[n - 1 - k];
    const Eigen::VectorXd ls = design.colPivHouseholderQr().solve(y.tail(y.size() - 4));
    EXPECT_LT((est - ls).norm() / a.norm(), 1e-3) << "seed " << seed;
  }
}

TEST(Burg, DegenerateInputThrowsUnstableLpc) {
  EXPECT_EQ(kind_of([] { burg_lpc(Eigen::VectorXd::Zero(64), 10); }), ErrorKind::UnstableLPC);
}

TEST(Roots, CompanionMatrixOfKnownPolynomial) {
  // (z - 2)(z + 1)(z - 0.5) = z^3 - 1.5 z^2 - 1.5 z + 1
  Eigen::VectorXd c(3);
  c << -1.5, -1.5, 1.0;
  auto roots = polynomial_roots(c);
  std::sort(roots.begin(), roots.end(), [](auto a, auto b) { return a.real() < b.real(); });
  ASSERT_EQ(roots.size(), 3u);
  EXPECT_NEAR(roots[0].real(), -1.0, 1e-12);
  EXPECT_NEAR(roots[1].real(), 0.5, 1e-12);
  EXPECT_NEAR(roots[2].real(), 2.0, 1e-12);
}

TEST(Resample, PreservesAToneBelowBothNyquists) {
  Eigen::VectorXd x(kRate);
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = std::sin(2.0 * kPi * 440.0 * i / kRate);
  const Eigen::VectorXd y = resample(x, kRate, 10000.0);
  EXPECT_NEAR(static_cast<double>(y.size()), 10000.0, 1.0);
  for (Eigen::Index i = 100; i < y.size() - 100; ++i) EXPECT_NEAR(y[i], std::sin(2.0 * kPi * 440.0 * i / 10000.0), 2e-2);
}

// --- ceiling optimisation ----------------------------------------------------

std::vector<VowelToken> speaker_tokens(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, 15.0);
  const auto vowels = default_vowels();
  std::vector<VowelToken> tokens;
  for (int rep = 0; rep < 3; ++rep)
    for (const auto& v : vowels) {
      Eigen::Vector3d f = v.formants;
      for (int k = 0; k < 3; ++k) f[k] += jitter(rng);
      VowelAudioSpec spec = steady_vowel(f, Eigen::VectorXd::Constant(1, 110.0 + 5.0 * rep), 0.25);
      spec.seed = seed * 100 + static_cast<std::uint64_t>(tokens.size());
      tokens.push_back({synth_vowel_audio(spec), v.label});
    }
  return tokens;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Exhaustive recomputation of the grid objective.
double oracle_ceiling(const std::vector<VowelToken>& tokens, double init, const AnalysisConfig& cfg) {
  double best = 0.0, best_obj = std::numeric_limits<double>::infinity();
  for (double c = init - 500.0; c <= init + 500.0 + 1e-9; c += 50.0) {
    std::map<std::string, std::vector<std::pair<double, double>>> groups;
    for (const auto& tok : tokens) {
      const FrameTrack t = extract_formants(tok.audio, c, cfg);
      std::vector<double> f1, f2;
      for (Eigen::Index i = 0; i < t.frames(); ++i)
        if (t.defined(i, 0) && t.defined(i, 1)) f1.push_back(t.values(i, 0)), f2.push_back(t.values(i, 1));
      if (!f1.empty()) groups[tok.vowel].emplace_back(median_of(f1), median_of(f2));
    }
    double obj = 0.0;
    for (const auto& [label, m] : groups) {
      double m1 = 0, m2 = 0;
      for (auto [a, b] : m) m1 += a, m2 += b;
      m1 /= static_cast<double>(m.size());
      m2 /= static_cast<double>(m.size());
      for (auto [a, b] : m) obj += ((a - m1) * (a - m1) + (b - m2) * (b - m2)) / static_cast<double>(m.size());
    }
    if (obj < best_obj) best_obj = obj, best = c;
  }
  return best;
}

TEST(CeilingSearch, AgreesWithExhaustiveGridOracle) {
  const auto tokens = speaker_tokens(7);
  const AnalysisConfig cfg;
  const double chosen = optimize_ceiling(tokens, 5000.0, cfg);
  EXPECT_NEAR(chosen, oracle_ceiling(tokens, 5000.0, cfg), 100.0);
  EXPECT_GE(chosen, 4500.0);
  EXPECT_LE(chosen, 5500.0);
}

TEST(CeilingSearch, IdenticalTokensTieToTheLowestCeiling) {
  const AudioBuffer a = synth_vowel_audio(steady_vowel({700.0, 1200.0, 2500.0}, Eigen::VectorXd::Constant(1, 120.0), 0.25));
  const std::vector<VowelToken> tokens(5, VowelToken{a, "a"});
  EXPECT_EQ(optimize_ceiling(tokens, 5000.0, AnalysisConfig{}), 4500.0);
}

TEST(CeilingSearch, NeedsFiveTokens) {
  const auto tokens = speaker_tokens(8);
  const std::vector<VowelToken> four(tokens.begin(), tokens.begin() + 4);
  EXPECT_EQ(kind_of([&] { optimize_ceiling(four, 5000.0, AnalysisConfig{}); }), ErrorKind::InsufficientTokens);
}

TEST(CeilingSearch, DeterministicAndPermutationInvariant) {
  auto tokens = speaker_tokens(9);
  const AnalysisConfig cfg;
  const double a = optimize_ceiling(tokens, 5500.0, cfg);
  EXPECT_EQ(optimize_ceiling(tokens, 5500.0, cfg), a);
  std::mt19937_64 rng(10);
  std::shuffle(tokens.begin(), tokens.end(), rng);
  EXPECT_EQ(optimize_ceiling(tokens, 5500.0, cfg), a);
  std::reverse(tokens.begin(), tokens.end());
  EXPECT_EQ(optimize_ceiling(tokens, 5500.0, cfg), a);
}

// --- config / audio IO -------------------------------------------------------

TEST(AnalysisConfig, RejectsInconsistentSettings) {
  AnalysisConfig cfg;
  cfg.pitch_floor = 400.0;
  EXPECT_EQ(kind_of([&] { validate(cfg); }), ErrorKind::InvalidConfig);
  cfg = {};
  cfg.window_length = 0.005;
  EXPECT_EQ(kind_of([&] { validate(cfg); }), ErrorKind::InvalidConfig);
  cfg = {};
  cfg.max_formants = 2;
  EXPECT_EQ(kind_of([&] { validate(cfg); }), ErrorKind::InvalidConfig);
}

TEST(AudioBuffer, Invariants) {
  EXPECT_EQ(kind_of([] { validate(AudioBuffer{Eigen::VectorXd(), kRate}); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { validate(AudioBuffer{Eigen::VectorXd::Zero(10), 4000}); }), ErrorKind::InvalidArgument);
  Eigen::VectorXd bad = Eigen::VectorXd::Zero(10);
  bad[3] = std::numeric_limits<double>::infinity();
  EXPECT_EQ(kind_of([&] { validate(AudioBuffer{bad, kRate}); }), ErrorKind::InvalidArgument);
}

class WavFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() / ("ipitch_wav_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  void write_raw(const std::filesystem::path& p, int channels, int bits, int format, const std::vector<char>& data) {
    std::ofstream os(p, std::ios::binary);
    auto u32 = [&](std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); };
    auto u16 = [&](std::uint16_t v) { os.write(reinterpret_cast<const char*>(&v), 2); };
    os.write("RIFF", 4);
    u32(static_cast<std::uint32_t>(36 + data.size()));
    os.write("WAVEfmt ", 8);
    u32(16);
    u16(static_cast<std::uint16_t>(format));
    u16(static_cast<std::uint16_t>(channels));
    u32(kRate);
    u32(static_cast<std::uint32_t>(kRate * channels * bits / 8));
    u16(static_cast<std::uint16_t>(channels * bits / 8));
    u16(static_cast<std::uint16_t>(bits));
    os.write("data", 4);
    u32(static_cast<std::uint32_t>(data.size()));
    os.write(data.data(), static_cast<std::streamsize>(data.size()));
  }

  std::filesystem::path dir_;
};

TEST_F(WavFiles, Pcm16RoundTripWithinQuantisation) {
  const AudioBuffer a = harmonic_complex(150.0, 3, 0.1);
  write_wav(dir_ / "a.wav", a);
  const AudioBuffer b = read_wav(dir_ / "a.wav");
  EXPECT_EQ(b.sample_rate, kRate);
  ASSERT_EQ(b.samples.size(), a.samples.size());
  EXPECT_LT((a.samples - b.samples).cwiseAbs().maxCoeff(), 1.0 / 32767.0);
}

TEST_F(WavFiles, Float32IsAccepted) {
  std::vector<char> data(4 * 3);
  const float v[] = {0.5f, -0.25f, 0.125f};
  std::memcpy(data.data(), v, sizeof v);
  write_raw(dir_ / "f.wav", 1, 32, 3, data);
  const AudioBuffer b = read_wav(dir_ / "f.wav");
  ASSERT_EQ(b.samples.size(), 3);
  EXPECT_EQ(b.samples[0], 0.5);
  EXPECT_EQ(b.samples[1], -0.25);
}

TEST_F(WavFiles, StereoIsRejected) {
  write_raw(dir_ / "s.wav", 2, 16, 1, std::vector<char>(16, 0));
  EXPECT_EQ(kind_of([&] { read_wav(dir_ / "s.wav"); }), ErrorKind::ParseFailure);
}

TEST_F(WavFiles, MissingFileIsMissingInput) {
  EXPECT_EQ(kind_of([&] { read_wav(dir_ / "none.wav"); }), ErrorKind::MissingInput);
}

TEST_F(WavFiles, GarbageIsParseFailure) {
  std::ofstream(dir_ / "g.wav") << "not a wave file at all";
  EXPECT_EQ(kind_of([&] { read_wav(dir_ / "g.wav"); }), ErrorKind::ParseFailure);
}

}  // namespace
}  // namespace ipitch
