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

#include "ipitch/signal_analysis.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numbers>
#include <optional>

#include <Eigen/Eigenvalues>

namespace ipitch {
namespace {

constexpr double kPi = std::numbers::pi;

struct FrameGrid {
  Eigen::Index count = 0;
  double first_center = 0.0;
};

// Frames of `window` seconds every `step` seconds, centred on the signal.
FrameGrid frame_grid(double duration, double window, double step) {
  FrameGrid grid;
  if (duration < window) return grid;
  grid.count = static_cast<Eigen::Index>(std::floor((duration - window) / step + 1e-9)) + 1;
  grid.first_center = 0.5 * (duration - static_cast<double>(grid.count - 1) * step);
  return grid;
}

// Samples of the window centred at `center` seconds; out-of-range samples are 0.
Eigen::VectorXd frame_samples(const Eigen::VectorXd& x, double rate, double center,
                              Eigen::Index length) {
  Eigen::VectorXd frame = Eigen::VectorXd::Zero(length);
  const auto start = static_cast<Eigen::Index>(std::lround(center * rate)) - length / 2;
  for (Eigen::Index i = 0; i < length; ++i) {
    const Eigen::Index j = start + i;
    if (j >= 0 && j < x.size()) frame[i] = x[j];
  }
  return frame;
}

Eigen::VectorXd hann_window(Eigen::Index length) {
  Eigen::VectorXd w(length);
  for (Eigen::Index i = 0; i < length; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * (static_cast<double>(i) + 0.5) / static_cast<double>(length));
  return w;
}

Eigen::VectorXd gaussian_window(Eigen::Index length) {
  const double edge = std::exp(-12.0);
  Eigen::VectorXd w(length);
  for (Eigen::Index i = 0; i < length; ++i) {
    const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(length) - 0.5;
    w[i] = (std::exp(-48.0 * u * u) - edge) / (1.0 - edge);
  }
  return w;
}

Eigen::VectorXd autocorrelation(const Eigen::VectorXd& x, Eigen::Index max_lag) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(max_lag + 1);
  const Eigen::Index n = x.size();
  for (Eigen::Index lag = 0; lag <= max_lag && lag < n; ++lag)
    r[lag] = x.head(n - lag).dot(x.tail(n - lag));
  return r;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct LagPeak {
  double lag;
  double strength;
};

}  // namespace

void validate(const AnalysisConfig& cfg) {
  if (!(cfg.pitch_floor > 0.0 && cfg.pitch_floor < cfg.pitch_ceiling))
    fail(ErrorKind::InvalidConfig, "pitch floor must be positive and below the ceiling");
  if (!(cfg.time_step > 0.0 && cfg.window_length > cfg.time_step))
    fail(ErrorKind::InvalidConfig, "window length must exceed the time step");
  if (cfg.max_formants < 3) fail(ErrorKind::InvalidConfig, "max_formants must be at least 3");
  if (!(cfg.voicing_threshold > 0.0 && cfg.voicing_threshold < 1.0))
    fail(ErrorKind::InvalidConfig, "voicing threshold must lie in (0, 1)");
  if (!(cfg.octave_tolerance > 0.0 && cfg.octave_tolerance <= 1.0))
    fail(ErrorKind::InvalidConfig, "octave tolerance must lie in (0, 1]");
  if (!(cfg.ceiling_search_step > 0.0 && cfg.ceiling_search_range >= 0.0))
    fail(ErrorKind::InvalidConfig, "ceiling search step must be positive");
}

AudioBuffer preemphasize(const AudioBuffer& audio, double from_hz) {
  const double alpha = std::exp(-2.0 * kPi * from_hz / audio.sample_rate);
  AudioBuffer out;
  out.sample_rate = audio.sample_rate;
  const Eigen::Index n = audio.samples.size();
  out.samples.resize(n);
  if (n == 0) return out;
  out.samples[0] = audio.samples[0] * (1.0 - alpha);
  out.samples.tail(n - 1) = audio.samples.tail(n - 1) - alpha * audio.samples.head(n - 1);
  return out;
}

Eigen::VectorXd resample(const Eigen::VectorXd& x, double from_rate, double to_rate) {
  if (!(from_rate > 0.0 && to_rate > 0.0))
    fail(ErrorKind::InvalidArgument, "resample: rates must be positive");
  if (from_rate == to_rate) return x;
  const double ratio = to_rate / from_rate;
  const double cutoff = std::min(1.0, ratio);
  constexpr double kHalfTaps = 32.0;
  const double support = kHalfTaps / cutoff;
  const auto n_out = static_cast<Eigen::Index>(std::floor(static_cast<double>(x.size()) * ratio));
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n_out);
  for (Eigen::Index m = 0; m < n_out; ++m) {
    const double t = static_cast<double>(m) / ratio;
    const auto lo = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::ceil(t - support)));
    const auto hi = std::min<Eigen::Index>(x.size() - 1, static_cast<Eigen::Index>(std::floor(t + support)));
    double acc = 0.0;
    for (Eigen::Index n = lo; n <= hi; ++n) {
      const double d = t - static_cast<double>(n);
      const double arg = kPi * cutoff * d;
      const double sinc = std::abs(arg) < 1e-12 ? 1.0 : std::sin(arg) / arg;
      const double window = 0.5 + 0.5 * std::cos(kPi * d / support);
      acc += x[n] * cutoff * sinc * window;
    }
    y[m] = acc;
  }
  return y;
}

std::vector<std::complex<double>> polynomial_roots(const Eigen::VectorXd& coeffs) {
  const Eigen::Index p = coeffs.size();
  if (p == 0) return {};
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
  companion.row(0) = -coeffs.transpose();
  companion.bottomLeftCorner(p - 1, p - 1).setIdentity();
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  if (solver.info() != Eigen::Success)
    fail(ErrorKind::UnstableLPC, "companion-matrix eigensolver did not converge");
  const Eigen::VectorXcd ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

FrameTrack extract_pitch(const AudioBuffer& audio, const AnalysisConfig& cfg) {
  validate(audio);
  validate(cfg);
  const double fs = audio.sample_rate;
  const double window_s = 3.0 / cfg.pitch_floor;
  const FrameGrid grid = frame_grid(audio.duration(), window_s, cfg.time_step);
  if (grid.count == 0)
    fail(ErrorKind::AudioTooShort, "audio shorter than one pitch window (" +
                                       std::to_string(window_s) + " s)");

  const auto length = static_cast<Eigen::Index>(std::lround(window_s * fs));
  const double min_lag = fs / cfg.pitch_ceiling;
  const double max_lag = fs / cfg.pitch_floor;
  const auto lag_limit = std::min<Eigen::Index>(length - 1, static_cast<Eigen::Index>(std::ceil(max_lag)) + 1);

  const Eigen::VectorXd window = hann_window(length);
  Eigen::VectorXd window_ac = autocorrelation(window, lag_limit);
  window_ac /= window_ac[0];
  const double global_peak = audio.samples.cwiseAbs().maxCoeff();

  FrameTrack track;
  track.time_step = cfg.time_step;
  track.values = Eigen::MatrixXd::Zero(grid.count, 1);
  track.defined = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(grid.count, 1, false);
  track.times.resize(static_cast<std::size_t>(grid.count));

  for (Eigen::Index f = 0; f < grid.count; ++f) {
    const double center = grid.first_center + static_cast<double>(f) * cfg.time_step;
    track.times[static_cast<std::size_t>(f)] = center;

    Eigen::VectorXd frame = frame_samples(audio.samples, fs, center, length);
    if (frame.cwiseAbs().maxCoeff() < cfg.silence_threshold * global_peak) continue;
    frame.array() -= frame.mean();
    frame.array() *= window.array();
    Eigen::VectorXd r = autocorrelation(frame, lag_limit);
    if (!(r[0] > 0.0)) continue;
    r /= r[0];
    r.array() /= window_ac.array().max(1e-3);

    std::vector<LagPeak> peaks;
    for (Eigen::Index lag = 1; lag < lag_limit; ++lag) {
      if (!(r[lag] > r[lag - 1] && r[lag] >= r[lag + 1])) continue;
      const double num = r[lag - 1] - r[lag + 1];
      const double den = r[lag - 1] - 2.0 * r[lag] + r[lag + 1];
      const double shift = den < 0.0 ? 0.5 * num / den : 0.0;
      const double refined = static_cast<double>(lag) + shift;
      if (refined < min_lag || refined > max_lag) continue;
      peaks.push_back({refined, r[lag] - 0.25 * num * shift});
    }
    if (peaks.empty()) continue;
    const double best = std::max_element(peaks.begin(), peaks.end(), [](const auto& a, const auto& b) {
                          return a.strength < b.strength;
                        })->strength;
    if (best < cfg.voicing_threshold) continue;
    double chosen = max_lag;
    for (const auto& p : peaks)
      if (p.strength >= cfg.octave_tolerance * best) chosen = std::min(chosen, p.lag);
    track.values(f, 0) = fs / chosen;
    track.defined(f, 0) = true;
  }
  return track;
}

FrameTrack extract_formants(const AudioBuffer& audio, double ceiling, const AnalysisConfig& cfg) {
  validate(audio);
  validate(cfg);
  const double target_rate = 2.0 * ceiling;
  if (!(ceiling > 2.0 * cfg.formant_margin) || target_rate > audio.sample_rate + 1e-9)
    fail(ErrorKind::InvalidArgument, "formant ceiling " + std::to_string(ceiling) +
                                         " Hz is not below the Nyquist frequency");

  AudioBuffer analysed;
  analysed.sample_rate = audio.sample_rate;
  analysed.samples = resample(audio.samples, audio.sample_rate, target_rate);
  const double fs = target_rate;
  // Pre-emphasis at the analysis rate; the buffer's integer rate field is
  // bypassed because 2 x ceiling need not be an integer.
  {
    const double alpha = std::exp(-2.0 * kPi * cfg.preemphasis_from / fs);
    Eigen::VectorXd& x = analysed.samples;
    for (Eigen::Index i = x.size() - 1; i >= 1; --i) x[i] -= alpha * x[i - 1];
    if (x.size() > 0) x[0] *= 1.0 - alpha;
  }

  const double window_s = 2.0 * cfg.window_length;
  const double duration = static_cast<double>(analysed.samples.size()) / fs;
  const FrameGrid grid = frame_grid(duration, window_s, cfg.time_step);
  if (grid.count == 0)
    fail(ErrorKind::AudioTooShort, "audio shorter than one formant window (" +
                                       std::to_string(window_s) + " s)");

  const auto length = static_cast<Eigen::Index>(std::lround(window_s * fs));
  const Eigen::VectorXd window = gaussian_window(length);
  const int order = 2 * cfg.max_formants;
  const double low = cfg.formant_margin;
  const double high = ceiling - cfg.formant_margin;

  FrameTrack track;
  track.time_step = cfg.time_step;
  track.values = Eigen::MatrixXd::Zero(grid.count, cfg.max_formants);
  track.defined = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(grid.count, cfg.max_formants, false);
  track.times.resize(static_cast<std::size_t>(grid.count));

  Eigen::Index fitted = 0;
  for (Eigen::Index f = 0; f < grid.count; ++f) {
    const double center = grid.first_center + static_cast<double>(f) * cfg.time_step;
    track.times[static_cast<std::size_t>(f)] = center;
    const Eigen::VectorXd frame =
        frame_samples(analysed.samples, fs, center, length).cwiseProduct(window);

    Eigen::VectorXd lpc;
    try {
      lpc = burg_lpc(frame, order);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::UnstableLPC) continue;
      throw;
    }
    ++fitted;

    std::vector<double> candidates;
    for (std::complex<double> z : polynomial_roots(lpc)) {
      if (!(z.imag() > 0.0)) continue;
      if (std::abs(z) > 1.0) z = 1.0 / std::conj(z);
      const double freq = std::arg(z) * fs / (2.0 * kPi);
      if (freq > low && freq < high) candidates.push_back(freq);
    }
    std::sort(candidates.begin(), candidates.end());
    const auto kept = std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(cfg.max_formants));
    for (std::size_t k = 0; k < kept; ++k) {
      track.values(f, static_cast<Eigen::Index>(k)) = candidates[k];
      track.defined(f, static_cast<Eigen::Index>(k)) = true;
    }
  }
  if (fitted == 0) fail(ErrorKind::UnstableLPC, "LPC fit degenerated on every frame");
  return track;
}

namespace {

// Median F1 and F2 over the frames of one token where both are defined.
std::optional<std::pair<double, double>> token_f1_f2(const AudioBuffer& audio, double ceiling,
                                                     const AnalysisConfig& cfg) {
  FrameTrack track;
  try {
    track = extract_formants(audio, ceiling, cfg);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::UnstableLPC || e.kind() == ErrorKind::AudioTooShort) return std::nullopt;
    throw;
  }
  std::vector<double> f1, f2;
  for (Eigen::Index i = 0; i < track.frames(); ++i) {
    if (track.defined(i, 0) && track.defined(i, 1)) {
      f1.push_back(track.values(i, 0));
      f2.push_back(track.values(i, 1));
    }
  }
  if (f1.empty()) return std::nullopt;
  return std::make_pair(median(f1), median(f2));
}

double population_variance(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size());
}

}  // namespace

double optimize_ceiling(std::span<const VowelToken> tokens, double init_ceiling,
                        const AnalysisConfig& cfg) {
  validate(cfg);
  if (tokens.size() < 5)
    fail(ErrorKind::InsufficientTokens,
         "ceiling optimisation needs at least 5 tokens, got " + std::to_string(tokens.size()));

  const auto n_steps = static_cast<int>(std::lround(cfg.ceiling_search_range / cfg.ceiling_search_step));
  double best_ceiling = 0.0;
  double best_objective = std::numeric_limits<double>::infinity();
  for (int s = -n_steps; s <= n_steps; ++s) {
    const double ceiling = init_ceiling + s * cfg.ceiling_search_step;
    bool feasible = true;
    for (const auto& token : tokens)
      if (2.0 * ceiling > token.audio.sample_rate) feasible = false;
    if (!feasible) continue;

    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_vowel;
    for (const auto& token : tokens) {
      const auto medians = token_f1_f2(token.audio, ceiling, cfg);
      if (!medians) continue;
      auto& slot = by_vowel[token.vowel];
      slot.first.push_back(medians->first);
      slot.second.push_back(medians->second);
    }
    if (by_vowel.empty()) continue;
    double objective = 0.0;
    for (const auto& [vowel, f] : by_vowel)
      objective += population_variance(f.first) + population_variance(f.second);

    const bool first = !std::isfinite(best_objective);
    if (first || objective < best_objective - 1e-9 * std::max(1.0, best_objective)) {
      best_objective = objective;
      best_ceiling = ceiling;
    }
  }
  if (!std::isfinite(best_objective))
    fail(ErrorKind::InsufficientTokens, "no ceiling produced usable formant measurements");
  return best_ceiling;
}

}  // namespace ipitch
