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

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ipitch/signal_analysis.hpp"

namespace ipitch {

inline constexpr int kContourPoints = 9;
using ContourPoints = Eigen::Matrix<double, kContourPoints, 1>;

enum class Feature { F1, F2, F3, F0 };
enum class Mode { Phonated, Whispered };
enum class Space { Hz, ZScore };

inline constexpr Feature kFormants[] = {Feature::F1, Feature::F2, Feature::F3};

std::string_view to_string(Feature f);
std::string_view to_string(Mode m);
std::string_view to_string(Space s);
Feature parse_feature(std::string_view s);
Mode parse_mode(std::string_view s);
Space parse_space(std::string_view s);

struct ContourVector {
  Feature feature = Feature::F1;
  ContourPoints points = ContourPoints::Zero();
  Space space = Space::Hz;
};

// Finite points, positive when in Hz.
void validate(const ContourVector& v);

struct PhoneSegment {
  std::string segment_id;
  std::string speaker_id;
  std::string sentence_id;
  int ordinal = 0;
  std::string phone;
  Mode mode = Mode::Phonated;
  // Both zero when the segment was loaded from a contour dataset (bounds
  // are not stored there).
  double start_s = 0.0;
  double end_s = 0.0;
  std::map<Feature, ContourVector> contours;

  bool has(Feature f) const { return contours.count(f) > 0; }
  const ContourVector& contour(Feature f) const;
};

void validate(const PhoneSegment& s);

struct Moments {
  double mean = 0.0;
  double sd = 1.0;
};

// Per-speaker normalisation moments, keyed by (feature, mode). Formants are
// normalised per mode; f0 only exists for phonated speech.
struct SpeakerStats {
  std::string speaker_id;
  std::map<std::pair<Feature, Mode>, Moments> moments;

  bool covers(Feature f, Mode m) const { return moments.count({f, m}) > 0; }
  // Throws MissingStats.
  const Moments& at(Feature f, Mode m) const;
};

using StatsTable = std::map<std::string, SpeakerStats>;

const SpeakerStats& stats_for(const StatsTable& table, const std::string& speaker);

struct PairedPhone {
  std::string id;
  PhoneSegment whispered;
  PhoneSegment phonated;
};

// Same speaker and phone; whispered carries no f0.
void validate(const PairedPhone& p);

// Samples the track slot at 10%, 20%, ..., 90% of [start_s, end_s]. Gaps
// are bridged linearly between the nearest defined frames. Throws
// NoOverlap when the segment lies outside the track and TooUnvoiced when
// fewer than min_defined_fraction of the in-segment frames are defined.
ContourVector resample_contour(const FrameTrack& track, Eigen::Index slot, Feature feature,
                               double start_s, double end_s, double min_defined_fraction = 0.5);

// Mean and population sd over every contour point of one speaker, per
// (feature, mode); f0 from phonated segments only.
SpeakerStats fit_speaker_stats(std::span<const PhoneSegment> segments);

// Splits by speaker and fits each.
StatsTable fit_all_speaker_stats(std::span<const PhoneSegment> segments);

ContourVector normalize(const ContourVector& v, const SpeakerStats& stats, Mode mode);
ContourVector denormalize(const ContourVector& v, const SpeakerStats& stats, Mode mode);

// Normalises every contour of the segment against its own speaker's stats.
PhoneSegment normalize(const PhoneSegment& s, const StatsTable& stats);
PairedPhone normalize(const PairedPhone& p, const StatsTable& stats);

struct PairingResult {
  std::vector<PairedPhone> pairs;
  std::size_t dropped = 0;
};

// Aligns phonated and whispered tokens per (speaker, sentence) by the
// longest common subsequence of phone labels in ordinal order; unmatched
// tokens on either side are dropped.
PairingResult pair_segments(std::vector<PhoneSegment> phonated, std::vector<PhoneSegment> whispered);

struct VowelSpaceRow {
  std::string phone;
  Mode mode = Mode::Phonated;
  std::size_t n = 0;
  double f1_mean = 0.0;
  double f1_sd = 0.0;
  double f2_mean = 0.0;
  double f2_sd = 0.0;
  // 1-sd covariance ellipse; angle of the major axis from the F1 axis
  // towards F2, in degrees.
  double ellipse_major = 0.0;
  double ellipse_minor = 0.0;
  double ellipse_angle_deg = 0.0;
};

// Midpoint (5th point) F1/F2 statistics per (phone, mode), hz-space input.
std::vector<VowelSpaceRow> vowel_space_stats(std::span<const PhoneSegment> segments);

// --- file formats ----------------------------------------------------------

struct AlignmentRow {
  std::string file;
  std::string speaker;
  std::string sentence_id;
  int ordinal = 0;
  std::string phone;
  Mode mode = Mode::Phonated;
  double start_s = 0.0;
  double end_s = 0.0;
};

// `file,speaker,sentence_id,ordinal,phone,mode,start_s,end_s`
std::vector<AlignmentRow> read_alignment_csv(const std::filesystem::path& path);
void write_alignment_csv(const std::filesystem::path& path, std::span<const AlignmentRow> rows);

// `segment_id,speaker,phone,mode,feature,space,p1,...,p9`; one row per
// contour. A paired dataset uses the pair id as segment_id for both modes.
void write_dataset_csv(const std::filesystem::path& path, std::span<const PairedPhone> pairs);
std::vector<PhoneSegment> read_dataset_csv(const std::filesystem::path& path);

// Groups dataset segments sharing a segment_id into pairs, sorted by id.
// Ids present in only one mode are skipped.
std::vector<PairedPhone> pairs_from_segments(std::vector<PhoneSegment> segments);

std::vector<PairedPhone> read_pairs_csv(const std::filesystem::path& path);

// `speaker,feature,mean,sd`; whispered formant rows use feature names such
// as `F1:whispered`.
void write_stats_csv(const std::filesystem::path& path, const StatsTable& stats);
StatsTable read_stats_csv(const std::filesystem::path& path);

// `phone,mode,n,f1_mean,f1_sd,f2_mean,f2_sd,ellipse_major,ellipse_minor,ellipse_angle_deg`
void write_vowel_space_csv(const std::filesystem::path& path, std::span<const VowelSpaceRow> rows);
std::vector<VowelSpaceRow> read_vowel_space_csv(const std::filesystem::path& path);

// Track dump `time_s,value_hz[,formant_index]`; undefined values are empty.
std::string format_track_csv(const FrameTrack& track, bool formant_track);

}  // namespace ipitch
