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

#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ipitch/audio.hpp"
#include "ipitch/error.hpp"

namespace ipitch {

struct AnalysisConfig {
  double pitch_floor = 75.0;
  double pitch_ceiling = 300.0;
  double time_step = 0.01;
  // Effective formant window; the Gaussian actually spans twice this.
  double window_length = 0.025;
  int max_formants = 5;
  double formant_ceiling_male = 5000.0;
  double formant_ceiling_female = 5500.0;
  double preemphasis_from = 50.0;
  double voicing_threshold = 0.45;
  // Lag peaks within this fraction of the best peak compete on shortest lag.
  double octave_tolerance = 0.9;
  // Frames whose peak amplitude is below this fraction of the global peak
  // are silent (unvoiced).
  double silence_threshold = 0.03;
  // Half-width, in Hz, of the band near 0 and near the ceiling where formant
  // candidates are discarded.
  double formant_margin = 50.0;
  // Escudero-style ceiling search: init +- range in steps of step.
  double ceiling_search_range = 500.0;
  double ceiling_search_step = 50.0;
};

// Throws InvalidConfig when the configuration is inconsistent.
void validate(const AnalysisConfig& cfg);

// Uniformly sampled per-frame values. Pitch tracks carry one slot (f0);
// formant tracks carry max_formants slots (F1, F2, ...). Slots without a
// value (unvoiced frames, missing formants) have defined == false and
// value 0.
struct FrameTrack {
  double time_step = 0.01;
  std::vector<double> times;
  Eigen::MatrixXd values;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> defined;

  Eigen::Index frames() const { return values.rows(); }
  Eigen::Index slots() const { return values.cols(); }
};

// y[n] = x[n] - a x[n-1], a = exp(-2 pi from_hz / fs), y[0] = x[0] (1 - a).
AudioBuffer preemphasize(const AudioBuffer& audio, double from_hz);

// Autocorrelation pitch tracker. Window is 3 / pitch_floor seconds.
FrameTrack extract_pitch(const AudioBuffer& audio, const AnalysisConfig& cfg);

// Burg-LPC formant tracker at the given ceiling (audio is resampled to
// 2 x ceiling first). Frames on which the LPC fit degenerates are left
// undefined; if every frame degenerates, throws UnstableLPC.
FrameTrack extract_formants(const AudioBuffer& audio, double ceiling,
                            const AnalysisConfig& cfg);

struct VowelToken {
  AudioBuffer audio;
  std::string vowel;
};

// Grid-searches ceilings around init_ceiling and returns the one that
// minimises the summed within-vowel variance of per-token F1/F2 medians.
// Ties resolve to the lowest ceiling.
double optimize_ceiling(std::span<const VowelToken> tokens, double init_ceiling,
                        const AnalysisConfig& cfg);

// Windowed-sinc (16-tap Hann) sample-rate conversion.
Eigen::VectorXd resample(const Eigen::VectorXd& x, double from_rate, double to_rate);

// Roots of the monic polynomial z^p + c[0] z^(p-1) + ... + c[p-1] from the
// eigenvalues of its companion matrix.
std::vector<std::complex<double>> polynomial_roots(const Eigen::VectorXd& coeffs);

// Burg estimate of the prediction-error filter A(z) = 1 + sum_k a[k] z^-(k+1).
// Returns a[0..order-1]. Throws UnstableLPC on zero energy or when a
// reflection coefficient reaches magnitude 1.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> burg_lpc(
    const Eigen::MatrixBase<Derived>& x, int order) {
  using Scalar = typename Derived::Scalar;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index n = x.size();
  if (order < 1 || n <= order)
    fail(ErrorKind::InvalidArgument, "burg_lpc: need more samples than the model order");

  Vec forward = x;
  Vec backward = x;
  Vec a = Vec::Zero(order + 1);
  a[0] = Scalar(1);
  for (int m = 1; m <= order; ++m) {
    Scalar num(0), den(0);
    for (Eigen::Index i = m; i < n; ++i) {
      num += forward[i] * backward[i - 1];
      den += forward[i] * forward[i] + backward[i - 1] * backward[i - 1];
    }
    if (!(den > Scalar(0)) || !std::isfinite(static_cast<double>(den)))
      fail(ErrorKind::UnstableLPC, "burg_lpc: zero prediction-error energy");
    const Scalar k = Scalar(-2) * num / den;
    if (!(std::abs(k) < Scalar(1)))
      fail(ErrorKind::UnstableLPC, "burg_lpc: reflection coefficient outside (-1, 1)");

    for (Eigen::Index i = n - 1; i >= m; --i) {
      const Scalar f = forward[i] + k * backward[i - 1];
      const Scalar b = backward[i - 1] + k * forward[i];
      forward[i] = f;
      backward[i] = b;
    }
    const Vec prev = a;
    for (int i = 1; i <= m; ++i) a[i] = prev[i] + k * prev[m - i];
  }
  return a.tail(order);
}

}  // namespace ipitch
