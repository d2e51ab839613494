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
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ipitch/contour.hpp"

namespace ipitch {

struct PearsonResult {
  double r = 0.0;
  // Set when either contour is constant; r is then 0.
  bool degenerate = false;
};

PearsonResult pearson_contour(const ContourPoints& a, const ContourPoints& b);
PearsonResult pearson_contour(const ContourVector& a, const ContourVector& b);

// |mean(pred) - mean(target)| in Hz after denormalising both z-score f0
// contours with the speaker's phonated f0 moments. Throws MissingStats.
double abs_f0_error(const ContourVector& pred, const ContourVector& target, const SpeakerStats& stats);

struct SegmentRecord {
  std::string segment_id;
  double pearson_r = 0.0;
  double abs_err_hz = 0.0;
  bool degenerate = false;
};

struct MetricRow {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  std::size_t n = 0;
};

struct EvalReport {
  std::vector<MetricRow> metrics;
  std::vector<SegmentRecord> records;
  std::map<std::string, std::string> config;

  const MetricRow& metric(const std::string& name) const;
};

// Mean and population sd. Throws EmptyRecords.
MetricRow summarize(const std::string& name, std::span<const double> values);

// `pearson_r` and `abs_err_hz` rows over the records. Throws EmptyRecords.
EvalReport aggregate(std::span<const SegmentRecord> records);

// Scores 9 x N z-score f0 predictions against the pairs' phonated f0.
std::vector<SegmentRecord> score_predictions(std::span<const PairedPhone> pairs, const Eigen::MatrixXd& predictions,
                                             const StatsTable& stats);

// Constant prediction at the speaker's mean f0 (z = 0), scored the same way.
std::vector<SegmentRecord> baseline_speaker_mean(std::span<const PairedPhone> pairs, const StatsTable& stats);

// Mean per-contour Pearson of whispered and denoised F1..F3 against the
// phonated contours: rows F1_whispered_r, F1_denoised_r, ...
std::vector<MetricRow> formant_correlation_report(std::span<const PairedPhone> pairs,
                                                  const Eigen::MatrixXd& denoised);

// `metric,mean,sd,n`
std::string format_report_csv(std::span<const MetricRow> rows);
// `segment_id,pearson_r,abs_err_hz,degenerate`
std::string format_records_csv(std::span<const SegmentRecord> records);
// `segment_id,point_index,target_z,pred_z`
std::string format_overlay_csv(std::span<const PairedPhone> pairs, const Eigen::MatrixXd& predictions);
// Fixed-width text table with Mean / St. Dev. / n columns.
std::string format_table(const std::string& title, std::span<const MetricRow> rows);

std::vector<MetricRow> read_report_csv(const std::filesystem::path& path);

}  // namespace ipitch
