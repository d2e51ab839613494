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

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Cholesky>

#include "fixtures.hpp"
#include "gradcheck.hpp"
#include "ipitch/autodiff.hpp"
#include "ipitch/checkpoint.hpp"
#include "ipitch/cli.hpp"
#include "ipitch/contour.hpp"
#include "ipitch/corpus_synth.hpp"
#include "ipitch/error.hpp"
#include "ipitch/evaluation.hpp"
#include "ipitch/layers.hpp"
#include "ipitch/models.hpp"
#include "ipitch/signal_analysis.hpp"

namespace fs = std::filesystem;
using namespace ipitch;
using ipitch::testing::check_gradients;
using ipitch::testing::probe;
using ipitch::testing::random_matrix;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back((ok ? "" : "FAILED ") + what);
  }
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    o = body();
  } catch (const std::exception& e) {
    o.check(false, std::string("exception: ") + e.what());
  }
  std::string detail;
  for (const auto& n : o.notes) detail += (detail.empty() ? "" : "; ") + n;
  std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << title << ", "
            << fmt("%.1f s", seconds_since(t0)) << "): " << detail << std::endl;
  if (!o.pass) ++failures;
}

// --- 1: gradients ------------------------------------------------------------

constexpr int kCases = 30;
constexpr double kGradTol = 1e-4;

using CaseFn = std::function<double(int seed)>;

double worst_over_cases(const CaseFn& fn) {
  double worst = 0.0;
  for (int seed = 0; seed < kCases; ++seed) worst = std::max(worst, fn(seed));
  return worst;
}

std::vector<Parameter*> mutable_params(const std::vector<const Parameter*>& ps) {
  std::vector<Parameter*> out;
  for (const Parameter* p : ps) out.push_back(const_cast<Parameter*>(p));
  return out;
}

Outcome gradients() {
  const std::vector<std::pair<std::string, CaseFn>> suites = {
      {"elementwise",
       [](int seed) {
         std::mt19937_64 rng(300 + seed);
         Parameter a{"a", random_matrix(3, 4, rng)}, b{"b", random_matrix(3, 4, rng)};
         Parameter bias{"bias", random_matrix(3, 1, rng)};
         const Eigen::MatrixXd w = random_matrix(3, 4, rng);
         auto loss = [&](Tape& t) {
           const Var x = t.parameter(a), y = t.parameter(b);
           return probe(add_bias(tanh(hadamard(x, y)) + sigmoid(x - y) + 0.5 * square(y), t.parameter(bias)), w);
         };
         return check_gradients(loss, {&a, &b, &bias}).max_rel_error;
       }},
      {"matmul",
       [](int seed) {
         std::mt19937_64 rng(400 + seed);
         Parameter a{"a", random_matrix(6, 5, rng)}, x{"x", random_matrix(5, 6, rng)};
         const Eigen::MatrixXd w = random_matrix(9, 2, rng);
         auto loss = [&](Tape& t) {
           const Var m = matmul(t.parameter(a), t.parameter(x));
           const Var parts[] = {row_block(m, 0, 2), row_block(m, 3, 1)};
           const Var flat = flatten_steps(concat_rows(parts), 3);
           return probe(flat, w) + sum(square(unflatten_steps(flat, 3, 3)));
         };
         return check_gradients(loss, {&a, &x}).max_rel_error;
       }},
      {"conv1d",
       [](int seed) {
         Rng rng(500 + seed);
         const Eigen::Index in = 1 + seed % 3, out = 2 + seed % 3, steps = 9, batch = 1 + seed % 2;
         Conv1dLayer layer("conv", in, out, 3, rng);
         layer.bias.value = random_matrix(out, 1, rng, 0.1);
         Parameter x{"x", random_matrix(in, steps * batch, rng)};
         const Eigen::MatrixXd w = random_matrix(out, steps * batch, rng);
         auto loss = [&](Tape& t) { return probe(tanh(layer.forward(t, t.parameter(x), steps)), w); };
         return check_gradients(loss, {&layer.weight, &layer.bias, &x}).max_rel_error;
       }},
      {"conv1d_transpose",
       [](int seed) {
         Rng rng(600 + seed);
         const Eigen::Index in = 2 + seed % 3, out = 1 + seed % 3, steps = 9, batch = 1 + seed % 2;
         Conv1dTransposeLayer layer("deconv", in, out, 3, rng);
         layer.bias.value = random_matrix(out, 1, rng, 0.1);
         Parameter x{"x", random_matrix(in, steps * batch, rng)};
         const Eigen::MatrixXd w = random_matrix(out, steps * batch, rng);
         auto loss = [&](Tape& t) { return probe(tanh(layer.forward(t, t.parameter(x), steps)), w); };
         return check_gradients(loss, {&layer.weight, &layer.bias, &x}).max_rel_error;
       }},
      {"linear",
       [](int seed) {
         Rng rng(700 + seed);
         const Eigen::Index in = 2 + seed % 5, out = 1 + seed % 4, batch = 1 + seed % 3;
         LinearLayer layer("fc", in, out, rng);
         layer.bias.value = random_matrix(out, 1, rng, 0.1);
         Parameter x{"x", random_matrix(in, batch, rng)};
         const Eigen::MatrixXd w = random_matrix(out, batch, rng);
         auto loss = [&](Tape& t) { return probe(tanh(layer.forward(t, t.parameter(x))), w); };
         return check_gradients(loss, {&layer.weight, &layer.bias, &x}).max_rel_error;
       }},
      {"bilstm",
       [](int seed) {
         Rng rng(800 + seed);
         const Eigen::Index features = 1 + seed % 3, hidden = 1 + seed % 4, steps = 2 + seed % 5, batch = 1 + seed % 2;
         BiLstmLayer layer("lstm", features, hidden, rng);
         std::vector<Parameter> inputs;
         std::vector<Eigen::MatrixXd> w;
         for (Eigen::Index t = 0; t < steps; ++t) inputs.push_back({"x", random_matrix(features, batch, rng)});
         for (Eigen::Index t = 0; t < steps; ++t) w.push_back(random_matrix(2 * hidden, batch, rng));
         const double rate = seed % 2 ? 0.4 : 0.0;
         auto loss = [&](Tape& t) {
           std::vector<Var> seq;
           for (auto& p : inputs) seq.push_back(t.parameter(p));
           Rng mask_rng(seed);
           const auto out = layer.forward(t, seq, rate, rate > 0.0, &mask_rng);
           Var total = probe(out[0], w[0]);
           for (std::size_t i = 1; i < out.size(); ++i) total = total + probe(out[i], w[i]);
           return total;
         };
         std::vector<Parameter*> params = mutable_params(layer.parameters());
         for (auto& p : inputs) params.push_back(&p);
         return check_gradients(loss, params).max_rel_error;
       }},
      {"loss_cosine",
       [](int seed) {
         std::mt19937_64 rng(1000 + seed);
         Parameter p{"pred", random_matrix(9 * (1 + seed % 3), 1 + seed % 4, rng)};
         const Eigen::MatrixXd y = random_matrix(p.value.rows(), p.value.cols(), rng);
         return check_gradients([&](Tape& t) { return loss_cosine(t.parameter(p), y); }, {&p}).max_rel_error;
       }},
      {"loss_combined",
       [](int seed) {
         std::mt19937_64 rng(1100 + seed);
         Parameter p{"pred", random_matrix(9, 1 + seed % 5, rng)};
         const Eigen::MatrixXd y = random_matrix(p.value.rows(), p.value.cols(), rng);
         return check_gradients([&](Tape& t) { return loss_combined(t.parameter(p), y); }, {&p}).max_rel_error;
       }},
      {"denoiser",
       [](int seed) {
         Denoiser model(2000 + seed);
         std::mt19937_64 rng(2100 + seed);
         const Eigen::MatrixXd x = random_matrix(27, 1 + seed % 4, rng), y = random_matrix(27, x.cols(), rng);
         auto loss = [&](Tape& t) { return loss_cosine(model.forward(t, x), y); };
         return check_gradients(loss, model.parameters(), 1e-4, 20, &rng).max_rel_error;
       }},
      {"predictor",
       [](int seed) {
         Predictor model(2200 + seed);
         std::mt19937_64 rng(2300 + seed);
         const Eigen::MatrixXd x = random_matrix(27, 1 + seed % 4, rng), y = random_matrix(9, x.cols(), rng);
         const double rate = seed % 2 ? 0.4 : 0.0;
         auto loss = [&](Tape& t) {
           Rng mask_rng(seed);
           return loss_combined(model.forward(t, x, rate, rate > 0.0, &mask_rng), y);
         };
         return check_gradients(loss, model.parameters(), 1e-4, 20, &rng).max_rel_error;
       }},
  };

  Outcome o;
  const auto t0 = Clock::now();
  for (const auto& [name, fn] : suites) {
    const double worst = worst_over_cases(fn);
    o.check(worst < kGradTol, fmt("%s max rel err %.2e", name.c_str(), worst));
  }
  const double elapsed = seconds_since(t0);
  o.check(elapsed < 60.0, fmt("%d cases x %zu suites in %.1f s", kCases, suites.size(), elapsed));
  return o;
}

// --- 2: loss identities --------------------------------------------------------

Outcome loss_identities() {
  Outcome o;
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> cols(1, 6);
  std::uniform_real_distribution<double> spread(0.01, 10.0), scale(1e-3, 1e3);
  const double pow2[] = {0.125, 0.5, 2.0, 4.0, 1024.0};

  double self_cos = 0.0, self_comb = 0.0, arbitrary_dev = 0.0;
  bool exact_pow2 = true, bounds = true, finite = true;
  for (int i = 0; i < 10000; ++i) {
    const Eigen::Index n = cols(rng);
    const double s = spread(rng);
    const Eigen::MatrixXd p = random_matrix(9, n, rng, s), y = random_matrix(9, n, rng);
    const double c = loss_cosine(p, y), m = loss_combined(p, y);
    finite &= std::isfinite(c) && std::isfinite(m);
    bounds &= c >= -1.0 && c <= 1.0 && m >= -1.0;
    self_cos = std::max(self_cos, std::abs(loss_cosine(y, y) + 1.0));
    self_comb = std::max(self_comb, std::abs(loss_combined(y, y) + 1.0));
    exact_pow2 &= loss_cosine(pow2[i % 5] * p, y) == c;
    arbitrary_dev = std::max(arbitrary_dev, std::abs(loss_cosine(scale(rng) * p, y) - c));
  }
  o.check(self_cos < 1e-15, fmt("|cos(y,y)+1| <= %.1e", self_cos));
  o.check(self_comb < 1e-15, fmt("|combined(y,y)+1| <= %.1e", self_comb));
  o.check(exact_pow2, "power-of-two scaling bit-exact");
  o.check(arbitrary_dev < 1e-15, fmt("arbitrary positive scaling dev %.1e", arbitrary_dev));
  o.check(bounds && finite, "cos in [-1,1], combined >= -1 on 10000 inputs");
  return o;
}

// --- 3: DSP ----------------------------------------------------------------------

constexpr int kRate = 16000;

AudioBuffer harmonic_complex(double f0, int harmonics, double seconds) {
  const auto n = static_cast<Eigen::Index>(seconds * kRate);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int h = 1; h <= harmonics; ++h) x[i] += std::sin(2.0 * std::numbers::pi * h * f0 * i / kRate) / h;
  return {0.5 * x / x.cwiseAbs().maxCoeff(), kRate};
}

// Worst |error| over frames whose window stays clear of the file ends.
double worst_formant_error(const FrameTrack& t, const Eigen::Vector3d& truth, double duration, bool& all_defined) {
  double worst = 0.0;
  int frames = 0;
  for (Eigen::Index i = 0; i < t.frames(); ++i) {
    const double time = t.times[static_cast<std::size_t>(i)];
    if (time < 0.06 || time > duration - 0.06) continue;
    ++frames;
    for (int k = 0; k < 3; ++k) {
      if (!t.defined(i, k)) {
        all_defined = false;
        continue;
      }
      worst = std::max(worst, std::abs(t.values(i, k) - truth[k]));
    }
  }
  if (frames == 0) all_defined = false;
  return worst;
}

Outcome dsp() {
  Outcome o;
  const AnalysisConfig cfg;

  for (const Eigen::Vector3d truth : {Eigen::Vector3d(700.0, 1200.0, 2500.0), Eigen::Vector3d(500.0, 1500.0, 2500.0)}) {
    const double duration = 0.5;
    const AudioBuffer a = synth_vowel_audio(steady_vowel(truth, Eigen::VectorXd::Constant(1, 110.0), duration));
    bool defined = true;
    const double worst = worst_formant_error(extract_formants(a, 5000.0, cfg), truth, duration, defined);
    o.check(defined && worst <= 20.0,
            fmt("vowel %.0f/%.0f/%.0f worst formant err %.1f Hz", truth[0], truth[1], truth[2], worst));
  }

  {
    const FrameTrack t = extract_pitch(harmonic_complex(150.0, 3, 1.0), cfg);
    double worst = 0.0;
    Eigen::Index voiced = 0;
    for (Eigen::Index i = 0; i < t.frames(); ++i)
      if (t.defined(i, 0)) {
        ++voiced;
        worst = std::max(worst, std::abs(t.values(i, 0) - 150.0));
      }
    o.check(worst <= 2.0 && voiced * 10 > t.frames() * 9, fmt("150 Hz complex worst err %.2f Hz", worst));
  }

  {
    Eigen::VectorXd f0(2);
    f0 << 120.0, 180.0;
    const double duration = 0.8;
    const FrameTrack t = extract_pitch(synth_vowel_audio(steady_vowel({500.0, 1500.0, 2500.0}, f0, duration)), cfg);
    std::vector<std::pair<double, double>> pts;
    for (Eigen::Index i = 0; i < t.frames(); ++i)
      if (t.defined(i, 0)) pts.emplace_back(t.times[static_cast<std::size_t>(i)], t.values(i, 0));
    Eigen::MatrixXd x(pts.size(), 2);
    Eigen::VectorXd y(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      x.row(static_cast<Eigen::Index>(i)) << 1.0, pts[i].first;
      y[static_cast<Eigen::Index>(i)] = pts[i].second;
    }
    const Eigen::Vector2d fit = (x.transpose() * x).ldlt().solve(x.transpose() * y);
    const double e0 = std::abs(fit[0] - 120.0), e1 = std::abs(fit[0] + fit[1] * duration - 180.0);
    o.check(pts.size() > 40 && e0 <= 2.0 && e1 <= 2.0, fmt("glide 120->180 endpoint errs %.2f/%.2f Hz", e0, e1));
  }

  {
    Eigen::Index unvoiced = 0, frames = 0;
    for (const auto& v : default_vowels())
      for (std::uint64_t seed : {1u, 2u}) {
        VowelAudioSpec spec = steady_vowel(v.formants, Eigen::VectorXd(), 1.0);
        spec.whispered = true;
        spec.seed = seed;
        const FrameTrack t = extract_pitch(synth_vowel_audio(spec), cfg);
        unvoiced += (!t.defined.col(0)).count();
        frames += t.frames();
      }
    const double frac = static_cast<double>(unvoiced) / static_cast<double>(frames);
    o.check(frac >= 0.9, fmt("whispered inventory %.1f%% unvoiced", 100.0 * frac));
  }
  return o;
}

// --- 4, 5, 8: trained models on the default synthetic corpus ----------------------------

struct Trained {
  std::optional<Denoiser> denoiser;
  std::optional<Predictor> predictor;
  std::vector<MetricRow> formants;
  double model_r = 0.0, baseline_r = 0.0;
  double seconds = 0.0;
  std::size_t pairs = 0, test = 0;
};

Trained train_default() {
  Trained out;
  const auto t0 = Clock::now();
  SynthConfig synth;
  const SynthCorpus corpus = synth_paired_corpus(synth);
  const std::vector<PairedPhone> norm = ipitch::testing::normalized_pairs(corpus);
  out.pairs = norm.size();

  TrainConfig cfg;
  const DataSplit split = split_dataset(norm, cfg);
  auto den = train_denoiser(denoiser_dataset(norm), split, cfg);
  auto pred = train_predictor(predictor_dataset(norm, den.model), split, cfg);

  std::vector<std::size_t> pick = split.test;
  std::sort(pick.begin(), pick.end());
  std::vector<PairedPhone> test;
  for (std::size_t i : pick) test.push_back(norm[i]);
  out.test = test.size();

  const Eigen::MatrixXd whispered = formant_matrix(test, Mode::Whispered);
  const Eigen::MatrixXd denoised = den.model.denoise(whispered);
  const Eigen::MatrixXd predictions = pred.model.predict(predictor_inputs(denoised, whispered));
  out.formants = formant_correlation_report(test, denoised);
  out.model_r = aggregate(score_predictions(test, predictions, corpus.stats)).metric("pearson_r").mean;
  out.baseline_r = aggregate(baseline_speaker_mean(test, corpus.stats)).metric("pearson_r").mean;
  out.seconds = seconds_since(t0);
  out.denoiser.emplace(std::move(den.model));
  out.predictor.emplace(std::move(pred.model));
  return out;
}

double metric_mean(const std::vector<MetricRow>& rows, const std::string& name) {
  for (const auto& r : rows)
    if (r.name == name) return r.mean;
  fail(ErrorKind::InvalidArgument, "missing metric " + name);
}

Outcome formant_direction(const Trained& t) {
  Outcome o;
  o.check(t.pairs >= 2000, fmt("%zu pairs, %zu held out", t.pairs, t.test));
  for (const char* f : {"F1", "F2"}) {
    const double w = metric_mean(t.formants, std::string(f) + "_whispered_r");
    const double d = metric_mean(t.formants, std::string(f) + "_denoised_r");
    o.check(d - w >= 0.05, fmt("%s r %.3f -> %.3f (gain %.3f)", f, w, d, d - w));
  }
  o.notes.push_back(fmt("F3 r %.3f -> %.3f", metric_mean(t.formants, "F3_whispered_r"),
                        metric_mean(t.formants, "F3_denoised_r")));
  o.check(t.seconds < 300.0, fmt("synth+train+eval %.1f s", t.seconds));
  return o;
}

Outcome predictor_quality(const Trained& t) {
  Outcome o;
  o.check(t.model_r >= 0.5, fmt("held-out mean r %.3f", t.model_r));
  o.check(t.model_r > t.baseline_r, fmt("speaker-mean baseline r %.3f", t.baseline_r));
  return o;
}

// --- 6: normalization ------------------------------------------------------------

Outcome normalization() {
  Outcome o;
  const SynthCorpus corpus = synth_paired_corpus(SynthConfig{});
  std::map<std::tuple<std::string, Feature, Mode>, std::vector<double>> pooled;
  for (const auto& p : ipitch::testing::normalized_pairs(corpus))
    for (const PhoneSegment* s : {&p.phonated, &p.whispered})
      for (const auto& [f, v] : s->contours) {
        auto& bucket = pooled[{s->speaker_id, f, s->mode}];
        bucket.insert(bucket.end(), v.points.data(), v.points.data() + kContourPoints);
      }
  double worst_mean = 0.0, worst_sd = 0.0;
  for (const auto& [key, xs] : pooled) {
    const Eigen::Map<const Eigen::VectorXd> x(xs.data(), static_cast<Eigen::Index>(xs.size()));
    const double m = x.mean();
    worst_mean = std::max(worst_mean, std::abs(m));
    worst_sd = std::max(worst_sd, std::abs(std::sqrt((x.array() - m).square().mean()) - 1.0));
  }
  o.check(worst_mean < 1e-9 && worst_sd < 1e-9,
          fmt("%zu groups, max |mean| %.1e, max |sd-1| %.1e", pooled.size(), worst_mean, worst_sd));

  double worst_rel = 0.0;
  for (const auto& p : corpus.pairs)
    for (const PhoneSegment* s : {&p.phonated, &p.whispered}) {
      const SpeakerStats& st = stats_for(corpus.stats, s->speaker_id);
      for (const auto& [f, v] : s->contours) {
        const ContourVector back = denormalize(normalize(v, st, s->mode), st, s->mode);
        worst_rel = std::max(worst_rel, ((back.points - v.points).array().abs() / v.points.array().abs()).maxCoeff());
      }
    }
  o.check(worst_rel < 1e-9, fmt("round trip max rel err %.1e", worst_rel));
  return o;
}

// --- 7: CLI determinism ------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = slurp(e.path());
  return files;
}

// synth (with audio) -> extract -> train-denoiser -> train-predictor -> eval -> plot.
void cli_pipeline(const fs::path& root, Outcome& o) {
  fs::remove_all(root);
  fs::create_directories(root);
  const auto p = [&](const std::string& rel) { return (root / rel).string(); };
  const std::vector<std::vector<std::string>> steps = {
      {"synth", "--out", p("corpus"), "--seed", "5", "--speakers", "4", "--sentences", "6", "--audio"},
      {"extract", "--audio-dir", p("corpus/audio"), "--alignment", p("corpus/alignment.csv"), "--speaker-table",
       p("corpus/speakers.csv"), "--out", p("features"), "--threads", "2"},
      {"train-denoiser", "--dataset", p("features/dataset.csv"), "--stats", p("features/stats.csv"), "--out", p("den"),
       "--epochs", "30", "--seed", "5"},
      {"train-predictor", "--dataset", p("features/dataset.csv"), "--stats", p("features/stats.csv"), "--denoiser",
       p("den/checkpoint.json"), "--out", p("pred"), "--epochs", "30", "--seed", "5"},
      {"eval", "--dataset", p("features/dataset.csv"), "--stats", p("features/stats.csv"), "--denoiser",
       p("den/checkpoint.json"), "--predictor", p("pred/checkpoint.json"), "--out", p("eval"), "--seed", "5"},
      {"plot", "--eval-dir", p("eval"), "--denoiser-history", p("den/history.csv"), "--predictor-history",
       p("pred/history.csv"), "--out", p("plots")},
  };
  for (const auto& args : steps) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    if (code != 0) {
      o.check(false, args[0] + " exited " + std::to_string(code) + ": " + err.str());
      return;
    }
  }
}

Outcome determinism(const fs::path& workdir) {
  Outcome o;
  const fs::path root = workdir / "pipeline";
  cli_pipeline(root, o);
  if (!o.pass) return o;
  const auto first = snapshot(root);
  cli_pipeline(root, o);
  if (!o.pass) return o;
  const auto second = snapshot(root);

  std::size_t differing = 0;
  for (const auto& [name, bytes] : first) {
    const auto it = second.find(name);
    if (it == second.end() || it->second != bytes) {
      ++differing;
      o.notes.push_back("differs: " + name);
    }
  }
  o.check(first.size() == second.size() && differing == 0, fmt("%zu files compared", first.size()));
  for (const char* f : {"den/checkpoint.json", "pred/checkpoint.json", "eval/pitch_report.csv",
                        "eval/formant_report.csv", "eval/baseline_report.csv"})
    if (!first.contains(f)) o.check(false, std::string("missing ") + f);
  return o;
}

// --- 8: checkpoint round trip ----------------------------------------------------------

Outcome checkpoint_round_trip(const Trained& t, const fs::path& workdir) {
  Outcome o;
  fs::create_directories(workdir);
  const fs::path den_path = workdir / "denoiser_roundtrip.json", pred_path = workdir / "predictor_roundtrip.json";
  save_checkpoint(den_path, t.denoiser->to_checkpoint(TrainMeta{1, 300, 0.0, 0.0}));
  save_checkpoint(pred_path, t.predictor->to_checkpoint(TrainMeta{1, 300, 0.0, 0.0}));
  const Denoiser den = Denoiser::from_checkpoint(load_checkpoint(den_path));
  const Predictor pred = Predictor::from_checkpoint(load_checkpoint(pred_path));

  std::mt19937_64 rng(99);
  int den_same = 0, pred_same = 0;
  for (int i = 0; i < 100; ++i) {
    const Eigen::MatrixXd x = random_matrix(27, 1 + i % 8, rng);
    den_same += t.denoiser->denoise(x) == den.denoise(x);
    pred_same += t.predictor->predict(x) == pred.predict(x);
  }
  o.check(den_same == 100, fmt("denoiser %d/100 bit-identical", den_same));
  o.check(pred_same == 100, fmt("predictor %d/100 bit-identical", pred_same));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ipitch acceptance suite"};
  std::string workdir = (fs::temp_directory_path() / "ipitch_acceptance").string();
  app.add_option("--workdir", workdir, "scratch directory for CLI runs and checkpoints");
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(workdir);

  report(1, "gradient correctness", gradients);
  report(2, "loss identities", loss_identities);
  report(3, "DSP oracle closure", dsp);

  std::optional<Trained> trained;
  const auto train_once = [&]() -> const Trained& {
    if (!trained) trained = train_default();
    return *trained;
  };
  report(4, "denoiser direction of effect", [&] { return formant_direction(train_once()); });
  report(5, "predictor correlation", [&] { return predictor_quality(train_once()); });
  report(6, "normalization", normalization);
  report(7, "CLI determinism", [&] { return determinism(workdir); });
  report(8, "checkpoint round trip", [&] { return checkpoint_round_trip(train_once(), workdir); });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
