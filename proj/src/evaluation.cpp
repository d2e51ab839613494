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

#include "ipitch/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "ipitch/csv.hpp"
#include "ipitch/error.hpp"
#include "ipitch/models.hpp"

namespace ipitch {

const MetricRow& EvalReport::metric(const std::string& name) const {
  for (const auto& m : metrics)
    if (m.name == name) return m;
  fail(ErrorKind::InvalidArgument, "report has no metric '" + name + "'");
}

PearsonResult pearson_contour(const ContourPoints& a, const ContourPoints& b) {
  const ContourPoints da = a.array() - a.mean();
  const ContourPoints db = b.array() - b.mean();
  const double sa = da.squaredNorm();
  const double sb = db.squaredNorm();
  // Constant up to rounding of the mean.
  const auto flat = [](double ss, const ContourPoints& v) {
    return !(ss > 1e-24 * std::max(1.0, v.squaredNorm()));
  };
  if (flat(sa, a) || flat(sb, b)) return {0.0, true};
  const double r = da.dot(db) / std::sqrt(sa * sb);
  return {std::clamp(r, -1.0, 1.0), false};
}

PearsonResult pearson_contour(const ContourVector& a, const ContourVector& b) {
  return pearson_contour(a.points, b.points);
}

double abs_f0_error(const ContourVector& pred, const ContourVector& target, const SpeakerStats& stats) {
  const ContourVector p = denormalize(pred, stats, Mode::Phonated);
  const ContourVector t = denormalize(target, stats, Mode::Phonated);
  return std::abs(p.points.mean() - t.points.mean());
}

MetricRow summarize(const std::string& name, std::span<const double> values) {
  if (values.empty()) fail(ErrorKind::EmptyRecords, "no values to summarise for " + name);
  const Eigen::Map<const Eigen::VectorXd> v(values.data(), static_cast<Eigen::Index>(values.size()));
  MetricRow row;
  row.name = name;
  row.n = values.size();
  row.mean = v.mean();
  row.sd = std::sqrt((v.array() - row.mean).square().mean());
  return row;
}

EvalReport aggregate(std::span<const SegmentRecord> records) {
  if (records.empty()) fail(ErrorKind::EmptyRecords, "no records to aggregate");
  std::vector<double> r, err;
  for (const auto& rec : records) {
    r.push_back(rec.pearson_r);
    err.push_back(rec.abs_err_hz);
  }
  EvalReport report;
  report.metrics = {summarize("pearson_r", r), summarize("abs_err_hz", err)};
  report.records.assign(records.begin(), records.end());
  return report;
}

std::vector<SegmentRecord> score_predictions(std::span<const PairedPhone> pairs, const Eigen::MatrixXd& predictions,
                                             const StatsTable& stats) {
  if (predictions.rows() != kContourPoints || predictions.cols() != static_cast<Eigen::Index>(pairs.size()))
    fail(ErrorKind::ShapeMismatch, "predictions must be 9 x (number of pairs)");
  std::vector<SegmentRecord> records;
  records.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const ContourVector& target = pairs[i].phonated.contour(Feature::F0);
    ContourVector pred;
    pred.feature = Feature::F0;
    pred.space = Space::ZScore;
    pred.points = predictions.col(static_cast<Eigen::Index>(i));
    const PearsonResult pr = pearson_contour(pred, target);
    SegmentRecord rec;
    rec.segment_id = pairs[i].id;
    rec.pearson_r = pr.r;
    rec.degenerate = pr.degenerate;
    rec.abs_err_hz = abs_f0_error(pred, target, stats_for(stats, pairs[i].phonated.speaker_id));
    records.push_back(rec);
  }
  return records;
}

std::vector<SegmentRecord> baseline_speaker_mean(std::span<const PairedPhone> pairs, const StatsTable& stats) {
  const Eigen::MatrixXd flat = Eigen::MatrixXd::Zero(kContourPoints, static_cast<Eigen::Index>(pairs.size()));
  return score_predictions(pairs, flat, stats);
}

std::vector<MetricRow> formant_correlation_report(std::span<const PairedPhone> pairs,
                                                  const Eigen::MatrixXd& denoised) {
  if (denoised.rows() != kFormantRows || denoised.cols() != static_cast<Eigen::Index>(pairs.size()))
    fail(ErrorKind::ShapeMismatch, "denoised batch must be 27 x (number of pairs)");
  std::vector<MetricRow> rows;
  for (int f = 0; f < 3; ++f) {
    std::vector<double> whispered_r, denoised_r;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const ContourPoints& ph = pairs[i].phonated.contour(kFormants[f]).points;
      const ContourPoints& wh = pairs[i].whispered.contour(kFormants[f]).points;
      const ContourPoints dn = denoised.col(static_cast<Eigen::Index>(i)).segment(f * kContourPoints, kContourPoints);
      whispered_r.push_back(pearson_contour(wh, ph).r);
      denoised_r.push_back(pearson_contour(dn, ph).r);
    }
    const std::string name(to_string(kFormants[f]));
    rows.push_back(summarize(name + "_whispered_r", whispered_r));
    rows.push_back(summarize(name + "_denoised_r", denoised_r));
  }
  return rows;
}

std::string format_report_csv(std::span<const MetricRow> rows) {
  std::ostringstream os;
  os << "metric,mean,sd,n\n";
  for (const auto& r : rows) os << r.name << ',' << format_double(r.mean) << ',' << format_double(r.sd) << ',' << r.n << '\n';
  return os.str();
}

std::string format_records_csv(std::span<const SegmentRecord> records) {
  std::ostringstream os;
  os << "segment_id,pearson_r,abs_err_hz,degenerate\n";
  for (const auto& r : records)
    os << r.segment_id << ',' << format_double(r.pearson_r) << ',' << format_double(r.abs_err_hz) << ','
       << (r.degenerate ? 1 : 0) << '\n';
  return os.str();
}

std::string format_overlay_csv(std::span<const PairedPhone> pairs, const Eigen::MatrixXd& predictions) {
  std::ostringstream os;
  os << "segment_id,point_index,target_z,pred_z\n";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const ContourPoints& target = pairs[i].phonated.contour(Feature::F0).points;
    for (int k = 0; k < kContourPoints; ++k)
      os << pairs[i].id << ',' << (k + 1) << ',' << format_double(target[k]) << ','
         << format_double(predictions(k, static_cast<Eigen::Index>(i))) << '\n';
  }
  return os.str();
}

std::string format_table(const std::string& title, std::span<const MetricRow> rows) {
  std::ostringstream os;
  os << title << '\n';
  char line[160];
  std::snprintf(line, sizeof line, "%-24s %10s %10s %8s\n", "Metric", "Mean", "St. Dev.", "n");
  os << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-24s %10.3f %10.3f %8zu\n", r.name.c_str(), r.mean, r.sd, r.n);
    os << line;
  }
  return os.str();
}

std::vector<MetricRow> read_report_csv(const std::filesystem::path& path) {
  const CsvTable t = CsvTable::read(path);
  const std::size_t c_name = t.column("metric"), c_mean = t.column("mean"), c_sd = t.column("sd"), c_n = t.column("n");
  std::vector<MetricRow> rows;
  for (std::size_t r = 0; r < t.rows(); ++r)
    rows.push_back({t.at(r, c_name), t.number(r, c_mean), t.number(r, c_sd), static_cast<std::size_t>(t.integer(r, c_n))});
  return rows;
}

}  // namespace ipitch
