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

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ipitch/autodiff.hpp"
#include "ipitch/checkpoint.hpp"
#include "ipitch/contour.hpp"
#include "ipitch/layers.hpp"

namespace ipitch {

// --- losses ------------------------------------------------------------------
// Batches hold one sample per column.

// -(1/N) sum_i cos(pred_i, target_i). Throws ZeroNormVector.
double loss_cosine(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target);
// (1/N) sum_i mean_j (pred_ij - target_ij)^2 + loss_cosine.
double loss_combined(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target);

Var loss_cosine(Var pred, const Eigen::MatrixXd& target);
Var loss_combined(Var pred, const Eigen::MatrixXd& target);

// --- data --------------------------------------------------------------------

inline constexpr Eigen::Index kFormantRows = 3 * kContourPoints;

// Inputs and targets column-aligned with ids.
struct SequenceDataset {
  Eigen::MatrixXd inputs;
  Eigen::MatrixXd targets;
  std::vector<std::string> ids;

  Eigen::Index size() const { return inputs.cols(); }
};

// F1..F3 contours of one mode stacked as rows f*9 + t, one pair per column.
Eigen::MatrixXd formant_matrix(std::span<const PairedPhone> pairs, Mode mode);
// Phonated f0, 9 rows per column.
Eigen::MatrixXd f0_matrix(std::span<const PairedPhone> pairs);
// Denoised F1/F2 rows followed by the untouched whispered F3 rows.
Eigen::MatrixXd predictor_inputs(const Eigen::MatrixXd& denoised, const Eigen::MatrixXd& whispered);

struct TrainConfig {
  int epochs = 300;
  double learning_rate = 1e-4;
  double recurrent_dropout = 0.4;
  int batch_size = 32;
  std::uint64_t seed = 1;
  double train_fraction = 0.8;
  double val_fraction = 0.1;
  double test_fraction = 0.1;
};

void validate(const TrainConfig& cfg);

struct DataSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

// Per speaker (in pair-id order), shuffles with the config seed and cuts
// train/validation/test by the configured fractions.
DataSplit split_dataset(std::span<const PairedPhone> pairs, const TrainConfig& cfg);

struct EpochLosses {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

std::string format_history_csv(std::span<const EpochLosses> history);

// --- formant denoiser ----------------------------------------------------------

struct DenoiserShape {
  Eigen::Index features = 3;
  Eigen::Index steps = kContourPoints;
  Eigen::Index channels = 16;
  Eigen::Index kernel = 3;
  Eigen::Index embedding = 18;
};

// Conv encoder (3 x tanh conv, dense to embedding) mirrored by a dense +
// 3 x transposed-conv decoder. Works on 27 x B flattened contour batches.
class Denoiser {
 public:
  explicit Denoiser(std::uint64_t seed, DenoiserShape shape = {});

  Var forward(Tape& tape, const Eigen::MatrixXd& batch) const;
  Eigen::MatrixXd denoise(const Eigen::MatrixXd& batch) const;

  const DenoiserShape& shape() const { return shape_; }
  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;

  ModelCheckpoint to_checkpoint(const TrainMeta& meta) const;
  // Throws ArchitectureMismatch.
  static Denoiser from_checkpoint(const ModelCheckpoint& ckpt);

 private:
  DenoiserShape shape_;
  std::vector<Conv1dLayer> encoder_;
  LinearLayer to_embedding_;
  LinearLayer from_embedding_;
  std::vector<Conv1dTransposeLayer> decoder_;
};

// --- implicit f0 predictor ---------------------------------------------------

struct PredictorShape {
  Eigen::Index features = 3;
  Eigen::Index steps = kContourPoints;
  Eigen::Index hidden = 4;
  Eigen::Index layers = 2;
};

// Stacked bidirectional LSTMs and a per-step dense 2H -> 1 readout. Maps a
// 27 x B input batch to a 9 x B f0 batch.
class Predictor {
 public:
  explicit Predictor(std::uint64_t seed, PredictorShape shape = {});

  Var forward(Tape& tape, const Eigen::MatrixXd& batch, double recurrent_dropout, bool training, Rng* rng) const;
  Eigen::MatrixXd predict(const Eigen::MatrixXd& batch) const;

  const PredictorShape& shape() const { return shape_; }
  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;

  ModelCheckpoint to_checkpoint(const TrainMeta& meta) const;
  static Predictor from_checkpoint(const ModelCheckpoint& ckpt);

 private:
  PredictorShape shape_;
  std::vector<BiLstmLayer> lstm_;
  LinearLayer readout_;
};

// --- training ------------------------------------------------------------------

template <typename Model>
struct TrainResult {
  Model model;
  std::vector<EpochLosses> history;
  TrainMeta meta;
};

// Whispered F1-F3 -> phonated F1-F3, cosine loss. Pairs must be z-scored.
SequenceDataset denoiser_dataset(std::span<const PairedPhone> pairs);
// Denoised F1/F2 + whispered F3 -> phonated f0.
SequenceDataset predictor_dataset(std::span<const PairedPhone> pairs, const Denoiser& denoiser);

// Throws EmptyDataset and NonFiniteLoss. `progress` (if set) sees every epoch.
TrainResult<Denoiser> train_denoiser(const SequenceDataset& data, const DataSplit& split, const TrainConfig& cfg,
                                     const std::function<void(const EpochLosses&)>& progress = {});
TrainResult<Predictor> train_predictor(const SequenceDataset& data, const DataSplit& split, const TrainConfig& cfg,
                                       const std::function<void(const EpochLosses&)>& progress = {});

// Convenience overloads: split the pairs with split_dataset().
TrainResult<Denoiser> train_denoiser(std::span<const PairedPhone> pairs, const TrainConfig& cfg);
TrainResult<Predictor> train_predictor(std::span<const PairedPhone> pairs, const Denoiser& denoiser,
                                       const TrainConfig& cfg);

// Single-contour conveniences over the batch forward passes.
std::map<Feature, ContourVector> denoise(const PhoneSegment& whispered, const Denoiser& model);
ContourVector predict_f0(const Eigen::MatrixXd& inputs, const Predictor& model);

}  // namespace ipitch
