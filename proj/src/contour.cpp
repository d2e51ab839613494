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

#include "ipitch/contour.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "ipitch/csv.hpp"
#include "ipitch/error.hpp"

namespace ipitch {

std::string_view to_string(Feature f) {
  switch (f) {
    case Feature::F1: return "F1";
    case Feature::F2: return "F2";
    case Feature::F3: return "F3";
    case Feature::F0: return "f0";
  }
  return "?";
}

std::string_view to_string(Mode m) { return m == Mode::Phonated ? "phonated" : "whispered"; }

std::string_view to_string(Space s) { return s == Space::Hz ? "hz" : "zscore"; }

Feature parse_feature(std::string_view s) {
  if (s == "F1") return Feature::F1;
  if (s == "F2") return Feature::F2;
  if (s == "F3") return Feature::F3;
  if (s == "f0" || s == "F0") return Feature::F0;
  fail(ErrorKind::ParseFailure, "unknown feature '" + std::string(s) + "'");
}

Mode parse_mode(std::string_view s) {
  if (s == "phonated") return Mode::Phonated;
  if (s == "whispered") return Mode::Whispered;
  fail(ErrorKind::ParseFailure, "unknown mode '" + std::string(s) + "'");
}

Space parse_space(std::string_view s) {
  if (s == "hz") return Space::Hz;
  if (s == "zscore") return Space::ZScore;
  fail(ErrorKind::ParseFailure, "unknown space '" + std::string(s) + "'");
}

void validate(const ContourVector& v) {
  if (!v.points.allFinite()) fail(ErrorKind::InvalidArgument, "contour has non-finite points");
  if (v.space == Space::Hz && (v.points.array() <= 0.0).any())
    fail(ErrorKind::InvalidArgument, "hz-space contour has non-positive points");
}

const ContourVector& PhoneSegment::contour(Feature f) const {
  const auto it = contours.find(f);
  if (it == contours.end())
    fail(ErrorKind::InvalidArgument,
         "segment " + segment_id + " has no " + std::string(to_string(f)) + " contour");
  return it->second;
}

void validate(const PhoneSegment& s) {
  if ((s.start_s != 0.0 || s.end_s != 0.0) && !(s.end_s > s.start_s))
    fail(ErrorKind::InvalidArgument, "segment " + s.segment_id + " ends before it starts");
  if (s.mode == Mode::Whispered && s.has(Feature::F0))
    fail(ErrorKind::InvalidArgument, "whispered segment " + s.segment_id + " carries an f0 contour");
  for (const auto& [feature, v] : s.contours) {
    if (v.feature != feature) fail(ErrorKind::InvalidArgument, "contour keyed under the wrong feature");
    validate(v);
  }
}

const Moments& SpeakerStats::at(Feature f, Mode m) const {
  const auto it = moments.find({f, m});
  if (it == moments.end())
    fail(ErrorKind::MissingStats, "speaker " + speaker_id + " has no " + std::string(to_string(f)) +
                                      " stats for " + std::string(to_string(m)) + " speech");
  return it->second;
}

const SpeakerStats& stats_for(const StatsTable& table, const std::string& speaker) {
  const auto it = table.find(speaker);
  if (it == table.end()) fail(ErrorKind::MissingStats, "no stats for speaker " + speaker);
  return it->second;
}

void validate(const PairedPhone& p) {
  validate(p.whispered);
  validate(p.phonated);
  if (p.whispered.mode != Mode::Whispered || p.phonated.mode != Mode::Phonated)
    fail(ErrorKind::InvalidArgument, "pair " + p.id + " has swapped modes");
  if (p.whispered.speaker_id != p.phonated.speaker_id || p.whispered.phone != p.phonated.phone)
    fail(ErrorKind::InvalidArgument, "pair " + p.id + " mixes speakers or phones");
}

ContourVector resample_contour(const FrameTrack& track, Eigen::Index slot, Feature feature,
                               double start_s, double end_s, double min_defined_fraction) {
  if (!(end_s > start_s)) fail(ErrorKind::InvalidArgument, "segment must have positive duration");
  if (slot < 0 || slot >= track.slots()) fail(ErrorKind::InvalidArgument, "track slot out of range");
  const auto& times = track.times;
  if (times.empty() || end_s < times.front() || start_s > times.back())
    fail(ErrorKind::NoOverlap, "segment lies outside the analysed track");

  const std::size_t n = times.size();
  const auto defined = [&](std::size_t i) { return track.defined(static_cast<Eigen::Index>(i), slot); };
  const auto value = [&](std::size_t i) { return track.values(static_cast<Eigen::Index>(i), slot); };

  // Frames inside the segment, or the bracketing pair when none fall inside.
  std::size_t lo = std::lower_bound(times.begin(), times.end(), start_s) - times.begin();
  std::size_t hi = std::upper_bound(times.begin(), times.end(), end_s) - times.begin();
  if (lo >= hi) {
    lo = lo > 0 ? lo - 1 : 0;
    hi = std::min(n, lo + 2);
  }
  std::size_t voiced = 0;
  for (std::size_t i = lo; i < hi; ++i) voiced += defined(i) ? 1 : 0;
  if (static_cast<double>(voiced) < min_defined_fraction * static_cast<double>(hi - lo) || voiced == 0)
    fail(ErrorKind::TooUnvoiced, "only " + std::to_string(voiced) + " of " + std::to_string(hi - lo) +
                                     " frames carry a " + std::string(to_string(feature)) + " value");

  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < n; ++i)
    if (defined(i)) usable.push_back(i);

  ContourVector out;
  out.feature = feature;
  out.space = Space::Hz;
  const double duration = end_s - start_s;
  for (int k = 1; k <= kContourPoints; ++k) {
    const double t = start_s + k * duration / 10.0;
    const auto after = std::lower_bound(usable.begin(), usable.end(), t,
                                        [&](std::size_t i, double tt) { return times[i] < tt; });
    double v;
    if (after == usable.begin()) {
      v = value(usable.front());
    } else if (after == usable.end()) {
      v = value(usable.back());
    } else {
      const std::size_t i1 = *after;
      const std::size_t i0 = *(after - 1);
      const double w = (t - times[i0]) / (times[i1] - times[i0]);
      v = (1.0 - w) * value(i0) + w * value(i1);
    }
    out.points[k - 1] = v;
  }
  return out;
}

SpeakerStats fit_speaker_stats(std::span<const PhoneSegment> segments) {
  if (segments.empty()) fail(ErrorKind::EmptyDataset, "no segments to fit speaker stats on");
  SpeakerStats stats;
  stats.speaker_id = segments.front().speaker_id;

  std::map<std::pair<Feature, Mode>, std::vector<double>> values;
  for (const auto& s : segments) {
    if (s.speaker_id != stats.speaker_id)
      fail(ErrorKind::RequiresSingleSpeaker,
           "speaker stats need a single speaker, got " + stats.speaker_id + " and " + s.speaker_id);
    for (const auto& [feature, v] : s.contours) {
      if (v.space != Space::Hz) fail(ErrorKind::InvalidArgument, "speaker stats need hz-space contours");
      if (feature == Feature::F0 && s.mode != Mode::Phonated) continue;
      auto& bucket = values[{feature, s.mode}];
      bucket.insert(bucket.end(), v.points.data(), v.points.data() + kContourPoints);
    }
  }
  for (auto& [key, v] : values) {
    const Eigen::Map<const Eigen::VectorXd> x(v.data(), static_cast<Eigen::Index>(v.size()));
    const double mean = x.mean();
    const double sd = std::sqrt((x.array() - mean).square().mean());
    if (!(sd > 0.0))
      fail(ErrorKind::DegenerateFeature, "speaker " + stats.speaker_id + ": " +
                                             std::string(to_string(key.first)) + " (" +
                                             std::string(to_string(key.second)) + ") has zero variance");
    stats.moments[key] = {mean, sd};
  }
  return stats;
}

StatsTable fit_all_speaker_stats(std::span<const PhoneSegment> segments) {
  std::map<std::string, std::vector<PhoneSegment>> by_speaker;
  for (const auto& s : segments) by_speaker[s.speaker_id].push_back(s);
  StatsTable table;
  for (const auto& [speaker, list] : by_speaker) table[speaker] = fit_speaker_stats(list);
  return table;
}

ContourVector normalize(const ContourVector& v, const SpeakerStats& stats, Mode mode) {
  if (v.space != Space::Hz) fail(ErrorKind::InvalidArgument, "normalize expects an hz-space contour");
  const Moments& m = stats.at(v.feature, mode);
  ContourVector out = v;
  out.points = (v.points.array() - m.mean) / m.sd;
  out.space = Space::ZScore;
  return out;
}

ContourVector denormalize(const ContourVector& v, const SpeakerStats& stats, Mode mode) {
  if (v.space != Space::ZScore) fail(ErrorKind::InvalidArgument, "denormalize expects a z-score contour");
  const Moments& m = stats.at(v.feature, mode);
  ContourVector out = v;
  out.points = v.points.array() * m.sd + m.mean;
  out.space = Space::Hz;
  return out;
}

PhoneSegment normalize(const PhoneSegment& s, const StatsTable& stats) {
  const SpeakerStats& st = stats_for(stats, s.speaker_id);
  PhoneSegment out = s;
  for (auto& [feature, v] : out.contours) v = normalize(v, st, s.mode);
  return out;
}

PairedPhone normalize(const PairedPhone& p, const StatsTable& stats) {
  return {p.id, normalize(p.whispered, stats), normalize(p.phonated, stats)};
}

namespace {

using SentenceKey = std::pair<std::string, std::string>;

std::map<SentenceKey, std::vector<PhoneSegment>> by_sentence(std::vector<PhoneSegment> segments) {
  std::sort(segments.begin(), segments.end(), [](const PhoneSegment& a, const PhoneSegment& b) {
    return std::tie(a.speaker_id, a.sentence_id, a.ordinal, a.segment_id) <
           std::tie(b.speaker_id, b.sentence_id, b.ordinal, b.segment_id);
  });
  std::map<SentenceKey, std::vector<PhoneSegment>> out;
  for (auto& s : segments) out[{s.speaker_id, s.sentence_id}].push_back(std::move(s));
  return out;
}

}  // namespace

PairingResult pair_segments(std::vector<PhoneSegment> phonated, std::vector<PhoneSegment> whispered) {
  PairingResult result;
  auto p_groups = by_sentence(std::move(phonated));
  auto w_groups = by_sentence(std::move(whispered));

  for (auto& [key, p] : p_groups) {
    const auto wit = w_groups.find(key);
    if (wit == w_groups.end()) {
      result.dropped += p.size();
      continue;
    }
    auto& w = wit->second;
    const std::size_t np = p.size(), nw = w.size();
    // lcs[i][j]: LCS length of p[i..] and w[j..].
    std::vector<std::vector<std::size_t>> lcs(np + 1, std::vector<std::size_t>(nw + 1, 0));
    for (std::size_t i = np; i-- > 0;)
      for (std::size_t j = nw; j-- > 0;)
        lcs[i][j] = p[i].phone == w[j].phone ? lcs[i + 1][j + 1] + 1
                                             : std::max(lcs[i + 1][j], lcs[i][j + 1]);
    std::size_t i = 0, j = 0, matched = 0;
    while (i < np && j < nw) {
      if (p[i].phone == w[j].phone && lcs[i][j] == lcs[i + 1][j + 1] + 1) {
        PairedPhone pair;
        pair.id = key.first + "_" + key.second + "_" + std::to_string(p[i].ordinal);
        pair.phonated = std::move(p[i]);
        pair.whispered = std::move(w[j]);
        result.pairs.push_back(std::move(pair));
        ++matched;
        ++i;
        ++j;
      } else if (lcs[i + 1][j] >= lcs[i][j + 1]) {
        ++i;
      } else {
        ++j;
      }
    }
    result.dropped += (np - matched) + (nw - matched);
    w_groups.erase(wit);
  }
  for (const auto& [key, w] : w_groups) result.dropped += w.size();
  return result;
}

std::vector<VowelSpaceRow> vowel_space_stats(std::span<const PhoneSegment> segments) {
  std::map<std::pair<std::string, Mode>, std::vector<Eigen::Vector2d>> groups;
  for (const auto& s : segments) {
    if (!s.has(Feature::F1) || !s.has(Feature::F2)) continue;
    const auto& f1 = s.contour(Feature::F1);
    const auto& f2 = s.contour(Feature::F2);
    if (f1.space != Space::Hz || f2.space != Space::Hz)
      fail(ErrorKind::InvalidArgument, "vowel space statistics need hz-space contours");
    groups[{s.phone, s.mode}].emplace_back(f1.points[kContourPoints / 2], f2.points[kContourPoints / 2]);
  }
  std::vector<VowelSpaceRow> rows;
  for (const auto& [key, points] : groups) {
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const auto& p : points) mean += p;
    mean /= static_cast<double>(points.size());
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (const auto& p : points) cov += (p - mean) * (p - mean).transpose();
    cov /= static_cast<double>(points.size());

    VowelSpaceRow row;
    row.phone = key.first;
    row.mode = key.second;
    row.n = points.size();
    row.f1_mean = mean[0];
    row.f2_mean = mean[1];
    row.f1_sd = std::sqrt(cov(0, 0));
    row.f2_sd = std::sqrt(cov(1, 1));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
    row.ellipse_major = std::sqrt(std::max(0.0, eig.eigenvalues()[1]));
    row.ellipse_minor = std::sqrt(std::max(0.0, eig.eigenvalues()[0]));
    const Eigen::Vector2d axis = eig.eigenvectors().col(1);
    double angle = std::atan2(axis[1], axis[0]) * 180.0 / std::numbers::pi;
    if (angle < -90.0) angle += 180.0;
    if (angle > 90.0) angle -= 180.0;
    row.ellipse_angle_deg = row.ellipse_major > 0.0 ? angle : 0.0;
    rows.push_back(row);
  }
  return rows;
}

// --- file formats ----------------------------------------------------------

std::vector<AlignmentRow> read_alignment_csv(const std::filesystem::path& path) {
  const CsvTable t = CsvTable::read(path);
  const std::size_t c_file = t.column("file"), c_spk = t.column("speaker"), c_sent = t.column("sentence_id"),
                    c_ord = t.column("ordinal"), c_phone = t.column("phone"), c_mode = t.column("mode"),
                    c_start = t.column("start_s"), c_end = t.column("end_s");
  std::vector<AlignmentRow> rows;
  rows.reserve(t.rows());
  for (std::size_t r = 0; r < t.rows(); ++r) {
    AlignmentRow row;
    row.file = t.at(r, c_file);
    row.speaker = t.at(r, c_spk);
    row.sentence_id = t.at(r, c_sent);
    row.ordinal = static_cast<int>(t.integer(r, c_ord));
    row.phone = t.at(r, c_phone);
    row.mode = parse_mode(t.at(r, c_mode));
    row.start_s = t.number(r, c_start);
    row.end_s = t.number(r, c_end);
    if (!(row.end_s > row.start_s))
      fail(ErrorKind::ParseFailure, path.string() + " row " + std::to_string(r + 2) + ": end_s <= start_s");
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_alignment_csv(const std::filesystem::path& path, std::span<const AlignmentRow> rows) {
  std::ostringstream os;
  os << "file,speaker,sentence_id,ordinal,phone,mode,start_s,end_s\n";
  for (const auto& r : rows)
    os << r.file << ',' << r.speaker << ',' << r.sentence_id << ',' << r.ordinal << ',' << r.phone << ','
       << to_string(r.mode) << ',' << format_double(r.start_s) << ',' << format_double(r.end_s) << '\n';
  write_text_file(path, os.str());
}

namespace {

void write_segment_rows(std::ostream& os, const std::string& id, const PhoneSegment& s) {
  for (const auto& [feature, v] : s.contours) {
    os << id << ',' << s.speaker_id << ',' << s.phone << ',' << to_string(s.mode) << ',' << to_string(feature)
       << ',' << to_string(v.space);
    for (int k = 0; k < kContourPoints; ++k) os << ',' << format_double(v.points[k]);
    os << '\n';
  }
}

}  // namespace

void write_dataset_csv(const std::filesystem::path& path, std::span<const PairedPhone> pairs) {
  std::ostringstream os;
  os << "segment_id,speaker,phone,mode,feature,space";
  for (int k = 1; k <= kContourPoints; ++k) os << ",p" << k;
  os << '\n';
  for (const auto& p : pairs) {
    write_segment_rows(os, p.id, p.whispered);
    write_segment_rows(os, p.id, p.phonated);
  }
  write_text_file(path, os.str());
}

std::vector<PhoneSegment> read_dataset_csv(const std::filesystem::path& path) {
  const CsvTable t = CsvTable::read(path);
  const std::size_t c_id = t.column("segment_id"), c_spk = t.column("speaker"), c_phone = t.column("phone"),
                    c_mode = t.column("mode"), c_feat = t.column("feature"), c_space = t.column("space");
  std::size_t c_points[kContourPoints];
  for (int k = 0; k < kContourPoints; ++k) c_points[k] = t.column("p" + std::to_string(k + 1));

  std::map<std::pair<std::string, Mode>, PhoneSegment> segments;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const Mode mode = parse_mode(t.at(r, c_mode));
    PhoneSegment& s = segments[{t.at(r, c_id), mode}];
    if (s.segment_id.empty()) {
      s.segment_id = t.at(r, c_id);
      s.speaker_id = t.at(r, c_spk);
      s.phone = t.at(r, c_phone);
      s.mode = mode;
    } else if (s.speaker_id != t.at(r, c_spk) || s.phone != t.at(r, c_phone)) {
      fail(ErrorKind::ParseFailure, path.string() + " row " + std::to_string(r + 2) +
                                        ": segment " + s.segment_id + " changes speaker or phone");
    }
    ContourVector v;
    v.feature = parse_feature(t.at(r, c_feat));
    v.space = parse_space(t.at(r, c_space));
    for (int k = 0; k < kContourPoints; ++k) v.points[k] = t.number(r, c_points[k]);
    if (!s.contours.emplace(v.feature, v).second)
      fail(ErrorKind::ParseFailure, path.string() + ": duplicate " + std::string(to_string(v.feature)) +
                                        " contour for segment " + s.segment_id);
  }
  std::vector<PhoneSegment> out;
  out.reserve(segments.size());
  for (auto& [key, s] : segments) {
    try {
      validate(s);
    } catch (const Error& e) {
      fail(ErrorKind::ParseFailure, path.string() + ": " + e.what());
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<PairedPhone> pairs_from_segments(std::vector<PhoneSegment> segments) {
  std::map<std::string, PairedPhone> pairs;
  std::set<std::string> seen_w, seen_p;
  for (auto& s : segments) {
    PairedPhone& p = pairs[s.segment_id];
    p.id = s.segment_id;
    if (s.mode == Mode::Whispered) {
      seen_w.insert(s.segment_id);
      p.whispered = std::move(s);
    } else {
      seen_p.insert(s.segment_id);
      p.phonated = std::move(s);
    }
  }
  std::vector<PairedPhone> out;
  for (auto& [id, p] : pairs) {
    if (!seen_w.count(id) || !seen_p.count(id)) continue;
    validate(p);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<PairedPhone> read_pairs_csv(const std::filesystem::path& path) {
  return pairs_from_segments(read_dataset_csv(path));
}

void write_stats_csv(const std::filesystem::path& path, const StatsTable& stats) {
  std::ostringstream os;
  os << "speaker,feature,mean,sd\n";
  for (const auto& [speaker, st] : stats) {
    for (const auto& [key, m] : st.moments) {
      os << speaker << ',' << to_string(key.first);
      if (key.second == Mode::Whispered) os << ":whispered";
      os << ',' << format_double(m.mean) << ',' << format_double(m.sd) << '\n';
    }
  }
  write_text_file(path, os.str());
}

StatsTable read_stats_csv(const std::filesystem::path& path) {
  const CsvTable t = CsvTable::read(path);
  const std::size_t c_spk = t.column("speaker"), c_feat = t.column("feature"), c_mean = t.column("mean"),
                    c_sd = t.column("sd");
  StatsTable table;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    std::string_view name = t.at(r, c_feat);
    Mode mode = Mode::Phonated;
    if (const auto colon = name.find(':'); colon != std::string_view::npos) {
      mode = parse_mode(name.substr(colon + 1));
      name = name.substr(0, colon);
    }
    SpeakerStats& st = table[t.at(r, c_spk)];
    st.speaker_id = t.at(r, c_spk);
    const Moments m{t.number(r, c_mean), t.number(r, c_sd)};
    if (!(m.sd > 0.0)) fail(ErrorKind::ParseFailure, path.string() + ": non-positive sd");
    st.moments[{parse_feature(name), mode}] = m;
  }
  return table;
}

void write_vowel_space_csv(const std::filesystem::path& path, std::span<const VowelSpaceRow> rows) {
  std::ostringstream os;
  os << "phone,mode,n,f1_mean,f1_sd,f2_mean,f2_sd,ellipse_major,ellipse_minor,ellipse_angle_deg\n";
  for (const auto& r : rows)
    os << r.phone << ',' << to_string(r.mode) << ',' << r.n << ',' << format_double(r.f1_mean) << ','
       << format_double(r.f1_sd) << ',' << format_double(r.f2_mean) << ',' << format_double(r.f2_sd) << ','
       << format_double(r.ellipse_major) << ',' << format_double(r.ellipse_minor) << ','
       << format_double(r.ellipse_angle_deg) << '\n';
  write_text_file(path, os.str());
}

std::vector<VowelSpaceRow> read_vowel_space_csv(const std::filesystem::path& path) {
  const CsvTable t = CsvTable::read(path);
  const std::size_t c[] = {t.column("phone"),         t.column("mode"),          t.column("n"),
                           t.column("f1_mean"),       t.column("f1_sd"),         t.column("f2_mean"),
                           t.column("f2_sd"),         t.column("ellipse_major"), t.column("ellipse_minor"),
                           t.column("ellipse_angle_deg")};
  std::vector<VowelSpaceRow> rows;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    VowelSpaceRow row;
    row.phone = t.at(r, c[0]);
    row.mode = parse_mode(t.at(r, c[1]));
    row.n = static_cast<std::size_t>(t.integer(r, c[2]));
    row.f1_mean = t.number(r, c[3]);
    row.f1_sd = t.number(r, c[4]);
    row.f2_mean = t.number(r, c[5]);
    row.f2_sd = t.number(r, c[6]);
    row.ellipse_major = t.number(r, c[7]);
    row.ellipse_minor = t.number(r, c[8]);
    row.ellipse_angle_deg = t.number(r, c[9]);
    rows.push_back(row);
  }
  return rows;
}

std::string format_track_csv(const FrameTrack& track, bool formant_track) {
  std::ostringstream os;
  os << (formant_track ? "time_s,value_hz,formant_index\n" : "time_s,value_hz\n");
  for (Eigen::Index f = 0; f < track.frames(); ++f) {
    for (Eigen::Index s = 0; s < track.slots(); ++s) {
      os << format_double(track.times[static_cast<std::size_t>(f)]) << ',';
      if (track.defined(f, s)) os << format_double(track.values(f, s));
      if (formant_track) os << ',' << (s + 1);
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace ipitch
