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
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ipitch/autodiff.hpp"

namespace ipitch {

using Rng = std::mt19937_64;

// Uniform +-sqrt(6 / (fan_in + fan_out)).
Eigen::MatrixXd glorot_uniform(Eigen::Index rows, Eigen::Index cols, double fan_in, double fan_out, Rng& rng);

struct Conv1dLayer {
  Eigen::Index in_channels = 0;
  Eigen::Index out_channels = 0;
  Eigen::Index kernel = 3;
  Parameter weight;  // out x (in * kernel)
  Parameter bias;    // out x 1

  Conv1dLayer() = default;
  Conv1dLayer(std::string name, Eigen::Index in, Eigen::Index out, Eigen::Index kernel, Rng& rng);
  Var forward(Tape& tape, Var x, Eigen::Index steps) const;
};

struct Conv1dTransposeLayer {
  Eigen::Index in_channels = 0;
  Eigen::Index out_channels = 0;
  Eigen::Index kernel = 3;
  Parameter weight;  // in x (out * kernel)
  Parameter bias;    // out x 1

  Conv1dTransposeLayer() = default;
  Conv1dTransposeLayer(std::string name, Eigen::Index in, Eigen::Index out, Eigen::Index kernel, Rng& rng);
  Var forward(Tape& tape, Var x, Eigen::Index steps) const;
};

struct LinearLayer {
  Parameter weight;  // out x in
  Parameter bias;    // out x 1

  LinearLayer() = default;
  LinearLayer(std::string name, Eigen::Index in, Eigen::Index out, Rng& rng);
  Var forward(Tape& tape, Var x) const;
};

// Gate rows are ordered input, forget, candidate, output.
struct LstmDirection {
  Parameter input_weight;   // 4H x F
  Parameter hidden_weight;  // 4H x H
  Parameter bias;           // 4H x 1, forget rows start at 1

  Eigen::Index hidden() const { return hidden_weight.value.cols(); }
};

struct BiLstmLayer {
  LstmDirection forward_dir;
  LstmDirection backward_dir;

  BiLstmLayer() = default;
  BiLstmLayer(std::string name, Eigen::Index features, Eigen::Index hidden, Rng& rng);

  // `steps[t]` is F x B. Returns T nodes of shape 2H x B (forward state on
  // top). With training set and recurrent_dropout > 0, each direction draws
  // one H x B keep-mask per call and applies it to h(t-1) at every step.
  std::vector<Var> forward(Tape& tape, std::span<const Var> steps, double recurrent_dropout, bool training,
                           Rng* rng) const;

  std::vector<const Parameter*> parameters() const;
};

// Bernoulli keep-mask scaled by 1 / (1 - rate).
Eigen::MatrixXd dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng& rng);

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::int64_t step = 0;
  std::vector<Eigen::MatrixXd> first_moment;
  std::vector<Eigen::MatrixXd> second_moment;
};

// One bias-corrected Adam update. Moment buffers are created on the first
// call; afterwards every shape must match (ShapeMismatch otherwise).
void adam_step(std::span<Parameter* const> params, std::span<const Eigen::MatrixXd> grads, AdamState& state);

}  // namespace ipitch
