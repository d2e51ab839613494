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

#include "ipitch/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "ipitch/audio.hpp"
#include "ipitch/checkpoint.hpp"
#include "ipitch/contour.hpp"
#include "ipitch/corpus_synth.hpp"
#include "ipitch/csv.hpp"
#include "ipitch/error.hpp"
#include "ipitch/evaluation.hpp"
#include "ipitch/models.hpp"
#include "ipitch/plot.hpp"
#include "ipitch/signal_analysis.hpp"

namespace ipitch {
namespace {

namespace fs = std::filesystem;

struct SynthOptions {
  std::string out;
  SynthConfig synth;
  double whisper_noise_sd = 60.0;
  bool audio = false;
  int sample_rate = 16000;
  double token_s = 0.2;
};

struct ExtractOptions {
  std::string audio_dir;
  std::string alignment;
  std::string speakers;
  std::string out;
  AnalysisConfig analysis;
  double min_defined_fraction = 0.5;
  bool no_ceiling_search = false;
  int threads = 0;
};

struct TrainOptions {
  std::string dataset;
  std::string stats;
  std::string denoiser;
  std::string out;
  TrainConfig train;
};

struct EvalOptions {
  std::string dataset;
  std::string stats;
  std::string denoiser;
  std::string predictor;
  std::string out;
  std::string split = "test";
  TrainConfig train;
};

struct PlotOptions {
  std::string eval_dir;
  std::string denoiser_history;
  std::string predictor_history;
  std::string out;
  int overlays = 6;
};

void require_file(const std::string& path, const std::string& what) {
  if (path.empty() || !fs::is_regular_file(path)) fail(ErrorKind::MissingInput, what + " not found: " + path);
}

void require_dir(const std::string& path, const std::string& what) {
  if (path.empty() || !fs::is_directory(path)) fail(ErrorKind::MissingInput, what + " not found: " + path);
}

void prepare_out(const std::string& path) {
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec || !fs::is_directory(path)) fail(ErrorKind::IoFailure, "cannot create output directory " + path);
}

// Reconstructs the effective settings of a subcommand as a config file.
void write_config_echo(const CLI::App& sub, const std::string& out_dir) {
  std::ostringstream os;
  os << "# " << sub.get_name() << '\n';
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& key = opt->get_lnames().front();
    if (key == "help" || key == "config") continue;
    std::string value;
    if (opt->count() > 0) {
      for (const auto& r : opt->results()) value += (value.empty() ? "" : " ") + r;
    } else {
      value = opt->get_default_str();
    }
    if (value.empty()) continue;
    os << key << '=' << value << '\n';
  }
  write_text_file(fs::path(out_dir) / "config.txt", os.str());
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  s = s.substr(b, e - b + 1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  require_file(path, "config file");
  std::istringstream in(read_text_file(path));
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::ParseFailure, path + ":" + std::to_string(number) + ": expected key=value");
    entries.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return entries;
}

// Turns config-file entries into flags appended after the explicit ones,
// skipping keys that were given on the command line.
std::vector<std::string> apply_config(CLI::App& app, std::vector<std::string> args) {
  std::string config_path;
  std::size_t sub_index = args.size();
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (sub_index == args.size() && !args[i].empty() && args[i][0] != '-') sub_index = i;
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
  }
  if (config_path.empty() || sub_index == args.size()) return args;
  CLI::App* sub = nullptr;
  try {
    sub = app.get_subcommand(args[sub_index]);
  } catch (const CLI::OptionNotFound&) {
    return args;
  }
  std::set<std::string> given;
  for (const auto& a : args) {
    if (a.rfind("--", 0) != 0) continue;
    given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
  }
  for (const auto& [key, value] : read_config_file(config_path)) {
    if (key == "config" || key == "help" || sub->get_option_no_throw("--" + key) == nullptr)
      fail(ErrorKind::InvalidConfig, "unknown config key '" + key + "' for " + sub->get_name());
    if (given.count(key)) continue;
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1 || n < 2) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(workers, n); ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

StatsTable stats_or_fit(const std::string& stats_path, std::span<const PairedPhone> pairs) {
  if (!stats_path.empty()) return read_stats_csv(stats_path);
  std::vector<PhoneSegment> segments;
  for (const auto& p : pairs) {
    segments.push_back(p.phonated);
    segments.push_back(p.whispered);
  }
  return fit_all_speaker_stats(segments);
}

std::vector<PairedPhone> normalize_all(std::span<const PairedPhone> pairs, const StatsTable& stats) {
  std::vector<PairedPhone> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(normalize(p, stats));
  return out;
}

// --- synth -------------------------------------------------------------------

int cmd_synth(const SynthOptions& o, const CLI::App& sub, std::ostream& out) {
  SynthConfig cfg = o.synth;
  cfg.whisper_noise_sd.setConstant(o.whisper_noise_sd);
  validate(cfg);
  prepare_out(o.out);
  const SynthCorpus corpus = synth_paired_corpus(cfg);
  const fs::path dir(o.out);
  write_dataset_csv(dir / "dataset.csv", corpus.pairs);
  write_stats_csv(dir / "stats.csv", corpus.stats);
  if (o.audio) {
    const RenderedCorpus rendered = render_corpus_audio(corpus, o.sample_rate, o.token_s, cfg.seed);
    for (const auto& f : rendered.files) {
      fs::create_directories(dir / "audio");
      write_wav(dir / "audio" / f.file, f.audio);
    }
    write_alignment_csv(dir / "alignment.csv", rendered.alignment);
    std::ostringstream os;
    os << "speaker,sex\n";
    for (const auto& [speaker, female] : rendered.speaker_sex) os << speaker << ',' << (female ? 'f' : 'm') << '\n';
    write_text_file(dir / "speakers.csv", os.str());
  }
  write_config_echo(sub, o.out);
  out << "synth: " << corpus.pairs.size() << " pairs from " << corpus.speakers.size() << " speakers -> " << o.out
      << '\n';
  return 0;
}

// --- extract -----------------------------------------------------------------

std::map<std::string, bool> read_speaker_sex(const std::string& path) {
  std::map<std::string, bool> female;
  if (path.empty()) return female;
  const CsvTable t = CsvTable::read(path);
  const std::size_t c_spk = t.column("speaker"), c_sex = t.column("sex");
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const std::string sex = t.at(r, c_sex);
    if (sex != "m" && sex != "f") fail(ErrorKind::ParseFailure, t.origin() + ": sex must be m or f");
    female[t.at(r, c_spk)] = sex == "f";
  }
  return female;
}

AudioBuffer slice(const AudioBuffer& audio, double start_s, double end_s) {
  const auto n = audio.samples.size();
  const auto a = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(start_s * audio.sample_rate)), 0, n);
  const auto b = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::ceil(end_s * audio.sample_rate)), a, n);
  return AudioBuffer{audio.samples.segment(a, b - a), audio.sample_rate};
}

int cmd_extract(const ExtractOptions& o, const CLI::App& sub, std::ostream& out, std::ostream& err, bool verbose) {
  validate(o.analysis);
  require_dir(o.audio_dir, "audio directory");
  require_file(o.alignment, "alignment CSV");
  if (!o.speakers.empty()) require_file(o.speakers, "speaker table");
  if (!(o.min_defined_fraction >= 0.0 && o.min_defined_fraction <= 1.0))
    fail(ErrorKind::InvalidConfig, "min-defined-fraction must lie in [0, 1]");
  prepare_out(o.out);
  const int threads = o.threads > 0 ? o.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  const std::vector<AlignmentRow> rows = read_alignment_csv(o.alignment);
  const std::map<std::string, bool> female = read_speaker_sex(o.speakers);
  std::vector<std::string> files;
  for (const auto& r : rows)
    if (std::find(files.begin(), files.end(), r.file) == files.end()) files.push_back(r.file);
  std::sort(files.begin(), files.end());
  for (const auto& f : files) require_file((fs::path(o.audio_dir) / f).string(), "audio file");

  std::vector<AudioBuffer> audio(files.size());
  parallel_for(files.size(), threads, [&](std::size_t i) { audio[i] = read_wav(fs::path(o.audio_dir) / files[i]); });
  auto audio_of = [&](const std::string& file) -> const AudioBuffer& {
    return audio[static_cast<std::size_t>(std::lower_bound(files.begin(), files.end(), file) - files.begin())];
  };

  // Formant ceiling per (speaker, mode).
  std::map<std::pair<std::string, Mode>, std::vector<const AlignmentRow*>> groups;
  for (const auto& r : rows) groups[{r.speaker, r.mode}].push_back(&r);
  std::vector<std::pair<std::string, Mode>> keys;
  for (const auto& [k, _] : groups) keys.push_back(k);
  std::vector<double> ceilings(keys.size());
  std::vector<std::string> sources(keys.size());
  parallel_for(keys.size(), threads, [&](std::size_t i) {
    const auto it = female.find(keys[i].first);
    const bool is_female = it != female.end() && it->second;
    const double init = is_female ? o.analysis.formant_ceiling_female : o.analysis.formant_ceiling_male;
    ceilings[i] = init;
    sources[i] = "default";
    const auto& members = groups.at(keys[i]);
    if (o.no_ceiling_search || members.size() < 5) return;
    std::vector<VowelToken> tokens;
    for (const AlignmentRow* r : members) tokens.push_back({slice(audio_of(r->file), r->start_s, r->end_s), r->phone});
    try {
      ceilings[i] = optimize_ceiling(tokens, init, o.analysis);
      sources[i] = "optimized";
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InsufficientTokens) throw;
    }
  });
  std::map<std::pair<std::string, Mode>, double> ceiling_of;
  for (std::size_t i = 0; i < keys.size(); ++i) ceiling_of[keys[i]] = ceilings[i];

  struct FileResult {
    std::vector<PhoneSegment> segments;
    std::vector<std::pair<std::string, std::string>> dropped;
  };
  std::vector<FileResult> results(files.size());
  parallel_for(files.size(), threads, [&](std::size_t i) {
    const AudioBuffer& a = audio[i];
    std::map<double, FrameTrack> formant_tracks;
    std::optional<FrameTrack> pitch;
    for (const auto& r : rows) {
      if (r.file != files[i]) continue;
      PhoneSegment seg;
      seg.speaker_id = r.speaker;
      seg.sentence_id = r.sentence_id;
      seg.ordinal = r.ordinal;
      seg.phone = r.phone;
      seg.mode = r.mode;
      seg.start_s = r.start_s;
      seg.end_s = r.end_s;
      seg.segment_id = r.speaker + "_" + r.sentence_id + "_" + std::to_string(r.ordinal) + "_" +
                       std::string(to_string(r.mode));
      try {
        const double ceiling = ceiling_of.at({r.speaker, r.mode});
        auto ft = formant_tracks.find(ceiling);
        if (ft == formant_tracks.end()) ft = formant_tracks.emplace(ceiling, extract_formants(a, ceiling, o.analysis)).first;
        for (int k = 0; k < 3; ++k)
          seg.contours[kFormants[k]] =
              resample_contour(ft->second, k, kFormants[k], r.start_s, r.end_s, o.min_defined_fraction);
        if (r.mode == Mode::Phonated) {
          if (!pitch) pitch = extract_pitch(a, o.analysis);
          seg.contours[Feature::F0] =
              resample_contour(*pitch, 0, Feature::F0, r.start_s, r.end_s, o.min_defined_fraction);
        }
        results[i].segments.push_back(std::move(seg));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::TooUnvoiced && e.kind() != ErrorKind::NoOverlap) throw;
        results[i].dropped.emplace_back(seg.segment_id, std::string(error_category(e.kind())));
      }
    }
  });

  std::vector<PhoneSegment> phonated, whispered;
  std::ostringstream dropped_csv;
  dropped_csv << "segment_id,reason\n";
  std::size_t dropped = 0;
  for (auto& r : results) {
    for (auto& s : r.segments) (s.mode == Mode::Phonated ? phonated : whispered).push_back(std::move(s));
    for (const auto& [id, reason] : r.dropped) dropped_csv << id << ',' << reason << '\n', ++dropped;
  }
  PairingResult paired = pair_segments(std::move(phonated), std::move(whispered));
  dropped += paired.dropped;
  if (paired.pairs.empty()) fail(ErrorKind::EmptyDataset, "no whispered/phonated pairs could be extracted");

  const fs::path dir(o.out);
  write_dataset_csv(dir / "dataset.csv", paired.pairs);
  write_stats_csv(dir / "stats.csv", stats_or_fit("", paired.pairs));
  std::ostringstream ceil_csv;
  ceil_csv << "speaker,mode,ceiling_hz,source\n";
  for (std::size_t i = 0; i < keys.size(); ++i)
    ceil_csv << keys[i].first << ',' << to_string(keys[i].second) << ',' << format_double(ceilings[i]) << ','
             << sources[i] << '\n';
  write_text_file(dir / "ceilings.csv", ceil_csv.str());
  write_text_file(dir / "dropped.csv", dropped_csv.str());
  write_config_echo(sub, o.out);
  if (verbose) err << "extract: " << files.size() << " files, " << rows.size() << " aligned tokens\n";
  out << "extract: " << paired.pairs.size() << " pairs, " << dropped << " tokens dropped -> " << o.out << '\n';
  return 0;
}

// --- training ----------------------------------------------------------------

std::function<void(const EpochLosses&)> progress_printer(bool verbose, std::ostream& err, const char* what) {
  if (!verbose) return {};
  return [&err, what](const EpochLosses& e) {
    if (e.epoch % 10 == 0 || e.epoch == 1)
      err << what << ": epoch " << e.epoch << " train " << e.train_loss << " val " << e.val_loss << '\n';
  };
}

int cmd_train_denoiser(const TrainOptions& o, const CLI::App& sub, std::ostream& out, std::ostream& err, bool verbose) {
  validate(o.train);
  require_file(o.dataset, "dataset");
  if (!o.stats.empty()) require_file(o.stats, "stats table");
  prepare_out(o.out);
  const std::vector<PairedPhone> pairs = read_pairs_csv(o.dataset);
  const StatsTable stats = stats_or_fit(o.stats, pairs);
  const std::vector<PairedPhone> norm = normalize_all(pairs, stats);
  const DataSplit split = split_dataset(norm, o.train);
  const auto result =
      train_denoiser(denoiser_dataset(norm), split, o.train, progress_printer(verbose, err, "train-denoiser"));
  const fs::path dir(o.out);
  save_checkpoint(dir / "checkpoint.json", result.model.to_checkpoint(result.meta));
  write_text_file(dir / "history.csv", format_history_csv(result.history));
  write_stats_csv(dir / "stats.csv", stats);
  write_config_echo(sub, o.out);
  out << "train-denoiser: final train loss " << result.meta.final_train_loss << " -> " << o.out << '\n';
  return 0;
}

int cmd_train_predictor(const TrainOptions& o, const CLI::App& sub, std::ostream& out, std::ostream& err,
                        bool verbose) {
  validate(o.train);
  require_file(o.dataset, "dataset");
  require_file(o.denoiser, "denoiser checkpoint");
  if (!o.stats.empty()) require_file(o.stats, "stats table");
  prepare_out(o.out);
  const std::vector<PairedPhone> pairs = read_pairs_csv(o.dataset);
  const StatsTable stats = stats_or_fit(o.stats, pairs);
  const std::vector<PairedPhone> norm = normalize_all(pairs, stats);
  const Denoiser denoiser = Denoiser::from_checkpoint(load_checkpoint(o.denoiser));
  const DataSplit split = split_dataset(norm, o.train);
  const auto result = train_predictor(predictor_dataset(norm, denoiser), split, o.train,
                                      progress_printer(verbose, err, "train-predictor"));
  const fs::path dir(o.out);
  save_checkpoint(dir / "checkpoint.json", result.model.to_checkpoint(result.meta));
  write_text_file(dir / "history.csv", format_history_csv(result.history));
  write_stats_csv(dir / "stats.csv", stats);
  write_config_echo(sub, o.out);
  out << "train-predictor: final train loss " << result.meta.final_train_loss << " -> " << o.out << '\n';
  return 0;
}

// --- eval --------------------------------------------------------------------

int cmd_eval(const EvalOptions& o, const CLI::App& sub, std::ostream& out) {
  validate(o.train);
  require_file(o.dataset, "dataset");
  require_file(o.denoiser, "denoiser checkpoint");
  require_file(o.predictor, "predictor checkpoint");
  if (!o.stats.empty()) require_file(o.stats, "stats table");
  if (o.split != "test" && o.split != "all") fail(ErrorKind::InvalidConfig, "split must be test or all");
  prepare_out(o.out);

  const std::vector<PairedPhone> pairs = read_pairs_csv(o.dataset);
  const StatsTable stats = stats_or_fit(o.stats, pairs);
  const std::vector<PairedPhone> norm = normalize_all(pairs, stats);
  const Denoiser denoiser = Denoiser::from_checkpoint(load_checkpoint(o.denoiser));
  const Predictor predictor = Predictor::from_checkpoint(load_checkpoint(o.predictor));

  std::vector<std::size_t> pick;
  if (o.split == "test") {
    pick = split_dataset(norm, o.train).test;
  } else {
    for (std::size_t i = 0; i < norm.size(); ++i) pick.push_back(i);
  }
  std::sort(pick.begin(), pick.end());
  std::vector<PairedPhone> eval_norm;
  std::vector<PhoneSegment> eval_hz;
  for (std::size_t i : pick) {
    eval_norm.push_back(norm[i]);
    eval_hz.push_back(pairs[i].phonated);
    eval_hz.push_back(pairs[i].whispered);
  }
  if (eval_norm.empty()) fail(ErrorKind::EmptyRecords, "evaluation split is empty");

  const Eigen::MatrixXd whispered = formant_matrix(eval_norm, Mode::Whispered);
  const Eigen::MatrixXd denoised = denoiser.denoise(whispered);
  const Eigen::MatrixXd predictions = predictor.predict(predictor_inputs(denoised, whispered));

  const EvalReport model = aggregate(score_predictions(eval_norm, predictions, stats));
  const EvalReport baseline = aggregate(baseline_speaker_mean(eval_norm, stats));
  const std::vector<MetricRow> formants = formant_correlation_report(eval_norm, denoised);

  const fs::path dir(o.out);
  write_text_file(dir / "pitch_report.csv", format_report_csv(model.metrics));
  write_text_file(dir / "baseline_report.csv", format_report_csv(baseline.metrics));
  write_text_file(dir / "formant_report.csv", format_report_csv(formants));
  write_text_file(dir / "pitch_records.csv", format_records_csv(model.records));
  write_text_file(dir / "baseline_records.csv", format_records_csv(baseline.records));
  write_text_file(dir / "overlay.csv", format_overlay_csv(eval_norm, predictions));
  write_vowel_space_csv(dir / "vowel_space.csv", vowel_space_stats(eval_hz));
  const std::string table = format_table("Formant correlation with phonated speech", formants) + '\n' +
                            format_table("Implicit pitch prediction", model.metrics) + '\n' +
                            format_table("Speaker-mean baseline", baseline.metrics);
  write_text_file(dir / "report.txt", table);
  write_config_echo(sub, o.out);
  out << table;
  return 0;
}

// --- plot --------------------------------------------------------------------

LineChart history_chart(const std::string& path, const std::string& title) {
  const CsvTable t = CsvTable::read(path);
  const std::size_t c_epoch = t.column("epoch"), c_train = t.column("train_loss"), c_val = t.column("val_loss");
  Series train{"train", {}, {}, false}, val{"validation", {}, {}, true};
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const double epoch = t.number(r, c_epoch);
    train.x.push_back(epoch);
    train.y.push_back(t.number(r, c_train));
    val.x.push_back(epoch);
    val.y.push_back(t.at(r, c_val).empty() ? std::numeric_limits<double>::quiet_NaN() : t.number(r, c_val));
  }
  return LineChart{title, "epoch", "loss", {train, val}};
}

int cmd_plot(const PlotOptions& o, const CLI::App& sub, std::ostream& out) {
  require_dir(o.eval_dir, "eval directory");
  const fs::path eval(o.eval_dir);
  require_file((eval / "overlay.csv").string(), "overlay CSV");
  require_file((eval / "vowel_space.csv").string(), "vowel-space CSV");
  if (!o.denoiser_history.empty()) require_file(o.denoiser_history, "denoiser history");
  if (!o.predictor_history.empty()) require_file(o.predictor_history, "predictor history");
  if (o.overlays < 0) fail(ErrorKind::InvalidConfig, "overlays must be >= 0");
  prepare_out(o.out);
  const fs::path dir(o.out);
  std::size_t written = 0;

  if (!o.denoiser_history.empty()) {
    write_text_file(dir / "loss_denoiser.svg", render_line_chart(history_chart(o.denoiser_history, "Denoiser loss")));
    ++written;
  }
  if (!o.predictor_history.empty()) {
    write_text_file(dir / "loss_predictor.svg",
                    render_line_chart(history_chart(o.predictor_history, "Predictor loss")));
    ++written;
  }

  const CsvTable t = CsvTable::read(eval / "overlay.csv");
  const std::size_t c_id = t.column("segment_id"), c_k = t.column("point_index"), c_target = t.column("target_z"),
                    c_pred = t.column("pred_z");
  std::vector<std::string> order;
  std::map<std::string, std::pair<Series, Series>> overlays;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const std::string id = t.at(r, c_id);
    if (!overlays.count(id)) {
      if (static_cast<int>(order.size()) >= o.overlays) continue;
      order.push_back(id);
      overlays[id] = {Series{"target", {}, {}, false}, Series{"predicted", {}, {}, true}};
    }
    auto& [target, pred] = overlays[id];
    const double k = t.number(r, c_k);
    target.x.push_back(k);
    target.y.push_back(t.number(r, c_target));
    pred.x.push_back(k);
    pred.y.push_back(t.number(r, c_pred));
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& [target, pred] = overlays[order[i]];
    LineChart chart{"f0 contour " + order[i], "contour point", "f0 (z-score)", {target, pred}};
    write_text_file(dir / ("overlay_" + std::to_string(i + 1) + ".svg"), render_line_chart(chart));
    ++written;
  }

  const std::vector<VowelSpaceRow> rows = read_vowel_space_csv(eval / "vowel_space.csv");
  write_text_file(dir / "vowel_space.svg", render_vowel_space(rows, "Vowel space (midpoint F1 x F2, 1 sd)"));
  ++written;
  write_config_echo(sub, o.out);
  out << "plot: " << written << " figures -> " << o.out << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Implicit pitch estimation from whispered vowels", "ipitch"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  bool verbose = false;
  std::string config;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "key=value file; keys are the long flag names, flags win")
        ->check(CLI::ExistingFile);
    sub->add_flag("--verbose", verbose, "Progress messages on stderr");
  };

  SynthOptions so;
  CLI::App* synth = app.add_subcommand("synth", "Generate a seeded synthetic paired corpus");
  common(synth);
  synth->add_option("--out", so.out, "Output directory")->required();
  synth->add_option("--seed", so.synth.seed, "Random seed");
  synth->add_option("--speakers", so.synth.n_speakers, "Number of speakers");
  synth->add_option("--sentences", so.synth.n_sentences_per_speaker, "Sentences per speaker");
  synth->add_option("--vowels-per-sentence", so.synth.vowels_per_sentence, "Vowel tokens per sentence");
  synth->add_option("--coupling", so.synth.coupling, "Formant/f0 coupling coefficient in [0, 1]");
  synth->add_option("--whisper-noise-sd", so.whisper_noise_sd, "Whispered formant noise sd (Hz), all formants");
  synth->add_option("--whisper-shift-f1", so.synth.whisper_shift[0], "Whispered F1 raise (Hz)");
  synth->add_option("--whisper-shift-f2", so.synth.whisper_shift[1], "Whispered F2 raise (Hz)");
  synth->add_option("--whisper-shift-f3", so.synth.whisper_shift[2], "Whispered F3 raise (Hz)");
  synth->add_option("--phonated-noise-sd", so.synth.phonated_noise_sd, "Phonated formant noise sd (Hz)");
  synth->add_option("--f0-base-male", so.synth.f0_base_male, "Mean male f0 (Hz)");
  synth->add_option("--f0-base-female", so.synth.f0_base_female, "Mean female f0 (Hz)");
  synth->add_flag("--audio", so.audio, "Also render per-sentence WAV files and an alignment CSV");
  synth->add_option("--sample-rate", so.sample_rate, "Audio sample rate (Hz)");
  synth->add_option("--token-duration", so.token_s, "Rendered vowel duration (s)");

  ExtractOptions eo;
  CLI::App* extract = app.add_subcommand("extract", "Extract 9-point contours from aligned audio");
  common(extract);
  extract->add_option("--audio-dir", eo.audio_dir, "Directory holding the WAV files")->required();
  extract->add_option("--alignment", eo.alignment, "Alignment CSV")->required();
  extract->add_option("--speaker-table", eo.speakers, "CSV speaker,sex (m/f) selecting the initial ceiling");
  extract->add_option("--out", eo.out, "Output directory")->required();
  extract->add_option("--pitch-floor", eo.analysis.pitch_floor, "Pitch floor (Hz)");
  extract->add_option("--pitch-ceiling", eo.analysis.pitch_ceiling, "Pitch ceiling (Hz)");
  extract->add_option("--time-step", eo.analysis.time_step, "Analysis time step (s)");
  extract->add_option("--window-length", eo.analysis.window_length, "Formant window length (s)");
  extract->add_option("--max-formants", eo.analysis.max_formants, "Formants per frame");
  extract->add_option("--ceiling-male", eo.analysis.formant_ceiling_male, "Initial male formant ceiling (Hz)");
  extract->add_option("--ceiling-female", eo.analysis.formant_ceiling_female, "Initial female formant ceiling (Hz)");
  extract->add_option("--preemphasis-from", eo.analysis.preemphasis_from, "Pre-emphasis corner (Hz)");
  extract->add_option("--voicing-threshold", eo.analysis.voicing_threshold, "Voicing threshold");
  extract->add_option("--silence-threshold", eo.analysis.silence_threshold, "Silence threshold");
  extract->add_option("--min-defined-fraction", eo.min_defined_fraction, "Minimum defined frames per token");
  extract->add_flag("--no-ceiling-search", eo.no_ceiling_search, "Use the initial ceilings as given");
  extract->add_option("--threads", eo.threads, "Worker threads (0 = hardware)");

  auto train_options = [](CLI::App* sub, TrainConfig& t) {
    sub->add_option("--seed", t.seed, "Random seed");
    sub->add_option("--train-fraction", t.train_fraction, "Training share of speakers' pairs");
    sub->add_option("--val-fraction", t.val_fraction, "Validation share");
    sub->add_option("--test-fraction", t.test_fraction, "Test share");
  };
  auto fit_options = [](CLI::App* sub, TrainConfig& t) {
    sub->add_option("--epochs", t.epochs, "Training epochs");
    sub->add_option("--learning-rate", t.learning_rate, "Adam learning rate");
    sub->add_option("--batch-size", t.batch_size, "Mini-batch size");
  };

  TrainOptions dto;
  CLI::App* train_den = app.add_subcommand("train-denoiser", "Train the whisper-to-phonated denoiser");
  common(train_den);
  train_den->add_option("--dataset", dto.dataset, "Contour dataset CSV")->required();
  train_den->add_option("--stats", dto.stats, "Speaker stats CSV (fitted from the dataset when omitted)");
  train_den->add_option("--out", dto.out, "Output directory")->required();
  train_options(train_den, dto.train);
  fit_options(train_den, dto.train);

  TrainOptions pto;
  CLI::App* train_pred = app.add_subcommand("train-predictor", "Train the f0 contour predictor");
  common(train_pred);
  train_pred->add_option("--dataset", pto.dataset, "Contour dataset CSV")->required();
  train_pred->add_option("--denoiser", pto.denoiser, "Denoiser checkpoint")->required();
  train_pred->add_option("--stats", pto.stats, "Speaker stats CSV (fitted from the dataset when omitted)");
  train_pred->add_option("--out", pto.out, "Output directory")->required();
  train_options(train_pred, pto.train);
  fit_options(train_pred, pto.train);
  train_pred->add_option("--recurrent-dropout", pto.train.recurrent_dropout, "Recurrent dropout rate");

  EvalOptions evo;
  CLI::App* eval = app.add_subcommand("eval", "Score both models and the speaker-mean baseline");
  common(eval);
  eval->add_option("--dataset", evo.dataset, "Contour dataset CSV")->required();
  eval->add_option("--stats", evo.stats, "Speaker stats CSV (fitted from the dataset when omitted)");
  eval->add_option("--denoiser", evo.denoiser, "Denoiser checkpoint")->required();
  eval->add_option("--predictor", evo.predictor, "Predictor checkpoint")->required();
  eval->add_option("--out", evo.out, "Output directory")->required();
  eval->add_option("--split", evo.split, "Pairs to score: test or all");
  train_options(eval, evo.train);

  PlotOptions po;
  CLI::App* plot = app.add_subcommand("plot", "Render SVG figures from eval outputs");
  common(plot);
  plot->add_option("--eval-dir", po.eval_dir, "Directory written by eval")->required();
  plot->add_option("--denoiser-history", po.denoiser_history, "Denoiser history.csv");
  plot->add_option("--predictor-history", po.predictor_history, "Predictor history.csv");
  plot->add_option("--out", po.out, "Output directory")->required();
  plot->add_option("--overlays", po.overlays, "Number of contour overlays to draw");

  try {
    const std::vector<std::string> args = apply_config(app, raw_args);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return 0;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return 0;
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
      }
      std::string msg = e.what();
      const bool missing = msg.find("does not exist") != std::string::npos;
      err << "error: " << (missing ? "io.missing_input" : "parse.cli") << ": " << msg << '\n';
      return missing ? 2 : 3;
    }

    if (synth->parsed()) return cmd_synth(so, *synth, out);
    if (extract->parsed()) return cmd_extract(eo, *extract, out, err, verbose);
    if (train_den->parsed()) return cmd_train_denoiser(dto, *train_den, out, err, verbose);
    if (train_pred->parsed()) return cmd_train_predictor(pto, *train_pred, out, err, verbose);
    if (eval->parsed()) return cmd_eval(evo, *eval, out);
    if (plot->parsed()) return cmd_plot(po, *plot, out);
    return 3;
  } catch (const Error& e) {
    err << "error: " << error_category(e.kind()) << ": " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "error: io.failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace ipitch
