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

#include "ipitch/layers.hpp"

#include <cmath>

#include "ipitch/error.hpp"

namespace ipitch {

Eigen::MatrixXd glorot_uniform(Eigen::Index rows, Eigen::Index cols, double fan_in, double fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Eigen::MatrixXd w(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) w(i, j) = dist(rng);
  return w;
}

Conv1dLayer::Conv1dLayer(std::string name, Eigen::Index in, Eigen::Index out, Eigen::Index k, Rng& rng)
    : in_channels(in), out_channels(out), kernel(k) {
  weight = {name + ".weight", glorot_uniform(out, in * k, double(in * k), double(out * k), rng)};
  bias = {name + ".bias", Eigen::MatrixXd::Zero(out, 1)};
}

Var Conv1dLayer::forward(Tape& tape, Var x, Eigen::Index steps) const {
  return conv1d(x, tape.parameter(weight), tape.parameter(bias), steps);
}

Conv1dTransposeLayer::Conv1dTransposeLayer(std::string name, Eigen::Index in, Eigen::Index out, Eigen::Index k,
                                           Rng& rng)
    : in_channels(in), out_channels(out), kernel(k) {
  weight = {name + ".weight", glorot_uniform(in, out * k, double(in * k), double(out * k), rng)};
  bias = {name + ".bias", Eigen::MatrixXd::Zero(out, 1)};
}

Var Conv1dTransposeLayer::forward(Tape& tape, Var x, Eigen::Index steps) const {
  return conv1d_transpose(x, tape.parameter(weight), tape.parameter(bias), steps);
}

LinearLayer::LinearLayer(std::string name, Eigen::Index in, Eigen::Index out, Rng& rng) {
  weight = {name + ".weight", glorot_uniform(out, in, double(in), double(out), rng)};
  bias = {name + ".bias", Eigen::MatrixXd::Zero(out, 1)};
}

Var LinearLayer::forward(Tape& tape, Var x) const {
  return add_bias(matmul(tape.parameter(weight), x), tape.parameter(bias));
}

namespace {

LstmDirection make_direction(const std::string& name, Eigen::Index features, Eigen::Index hidden, Rng& rng) {
  LstmDirection d;
  d.input_weight = {name + ".input_weight", glorot_uniform(4 * hidden, features, double(features), double(4 * hidden), rng)};
  d.hidden_weight = {name + ".hidden_weight", glorot_uniform(4 * hidden, hidden, double(hidden), double(4 * hidden), rng)};
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(4 * hidden, 1);
  b.middleRows(hidden, hidden).setOnes();
  d.bias = {name + ".bias", std::move(b)};
  return d;
}

std::vector<Var> run_direction(Tape& tape, const LstmDirection& dir, std::span<const Var> steps, bool reverse,
                               const Eigen::MatrixXd* mask) {
  const Eigen::Index h = dir.hidden();
  const Eigen::Index batch = steps.front().cols();
  const Var wx = tape.parameter(dir.input_weight);
  const Var wh = tape.parameter(dir.hidden_weight);
  const Var b = tape.parameter(dir.bias);
  const Var keep = mask ? tape.constant(*mask) : Var{};

  Var hidden = tape.constant(Eigen::MatrixXd::Zero(h, batch));
  Var cell = tape.constant(Eigen::MatrixXd::Zero(h, batch));
  std::vector<Var> out(steps.size());
  const std::size_t n = steps.size();
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t t = reverse ? n - 1 - s : s;
    const Var recurrent = mask ? hadamard(hidden, keep) : hidden;
    const Var z = add_bias(matmul(wx, steps[t]) + matmul(wh, recurrent), b);
    const Var i = sigmoid(row_block(z, 0, h));
    const Var f = sigmoid(row_block(z, h, h));
    const Var g = tanh(row_block(z, 2 * h, h));
    const Var o = sigmoid(row_block(z, 3 * h, h));
    cell = hadamard(f, cell) + hadamard(i, g);
    hidden = hadamard(o, tanh(cell));
    out[t] = hidden;
  }
  return out;
}

}  // namespace

BiLstmLayer::BiLstmLayer(std::string name, Eigen::Index features, Eigen::Index hidden, Rng& rng) {
  forward_dir = make_direction(name + ".fwd", features, hidden, rng);
  backward_dir = make_direction(name + ".bwd", features, hidden, rng);
}

std::vector<Var> BiLstmLayer::forward(Tape& tape, std::span<const Var> steps, double recurrent_dropout,
                                      bool training, Rng* rng) const {
  if (steps.empty()) fail(ErrorKind::ShapeMismatch, "lstm: empty sequence");
  const Eigen::Index features = forward_dir.input_weight.value.cols();
  for (const Var& s : steps)
    if (s.rows() != features || s.cols() != steps.front().cols())
      fail(ErrorKind::ShapeMismatch, "lstm: step shape does not match the layer input width");
  if (!(recurrent_dropout >= 0.0 && recurrent_dropout < 1.0))
    fail(ErrorKind::InvalidConfig, "recurrent dropout must lie in [0, 1)");

  const bool drop = training && recurrent_dropout > 0.0;
  if (drop && rng == nullptr) fail(ErrorKind::InvalidArgument, "lstm: dropout needs a random generator");
  const Eigen::Index batch = steps.front().cols();
  Eigen::MatrixXd fmask, bmask;
  if (drop) {
    fmask = dropout_mask(forward_dir.hidden(), batch, recurrent_dropout, *rng);
    bmask = dropout_mask(backward_dir.hidden(), batch, recurrent_dropout, *rng);
  }
  const auto fwd = run_direction(tape, forward_dir, steps, false, drop ? &fmask : nullptr);
  const auto bwd = run_direction(tape, backward_dir, steps, true, drop ? &bmask : nullptr);
  std::vector<Var> out(steps.size());
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const Var both[] = {fwd[t], bwd[t]};
    out[t] = concat_rows(both);
  }
  return out;
}

std::vector<const Parameter*> BiLstmLayer::parameters() const {
  return {&forward_dir.input_weight, &forward_dir.hidden_weight, &forward_dir.bias,
          &backward_dir.input_weight, &backward_dir.hidden_weight, &backward_dir.bias};
}

Eigen::MatrixXd dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng& rng) {
  std::bernoulli_distribution keep(1.0 - rate);
  const double scale = 1.0 / (1.0 - rate);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = keep(rng) ? scale : 0.0;
  return m;
}

void adam_step(std::span<Parameter* const> params, std::span<const Eigen::MatrixXd> grads, AdamState& state) {
  if (params.size() != grads.size()) fail(ErrorKind::ShapeMismatch, "adam: parameter and gradient counts differ");
  if (state.first_moment.empty()) {
    for (const Parameter* p : params) {
      state.first_moment.push_back(Eigen::MatrixXd::Zero(p->value.rows(), p->value.cols()));
      state.second_moment.push_back(Eigen::MatrixXd::Zero(p->value.rows(), p->value.cols()));
    }
  }
  if (state.first_moment.size() != params.size())
    fail(ErrorKind::ShapeMismatch, "adam: moment buffers do not match the parameter list");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& v = params[i]->value;
    if (grads[i].rows() != v.rows() || grads[i].cols() != v.cols() || state.first_moment[i].rows() != v.rows() ||
        state.first_moment[i].cols() != v.cols())
      fail(ErrorKind::ShapeMismatch, "adam: shape mismatch for " + params[i]->name);
  }

  const AdamConfig& c = state.config;
  ++state.step;
  const double correction1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& m = state.first_moment[i];
    auto& s = state.second_moment[i];
    m = c.beta1 * m + (1.0 - c.beta1) * grads[i];
    s = c.beta2 * s + (1.0 - c.beta2) * grads[i].cwiseAbs2();
    params[i]->value.array() -=
        c.learning_rate * (m.array() / correction1) / ((s.array() / correction2).sqrt() + c.epsilon);
  }
}

}  // namespace ipitch
