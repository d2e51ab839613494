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

#include "ipitch/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "ipitch/csv.hpp"
#include "ipitch/error.hpp"

namespace ipitch {

// --- losses ------------------------------------------------------------------

namespace {

void require_batch_shapes(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols())
    fail(ErrorKind::ShapeMismatch, "loss: prediction and target shapes differ");
  if (pred.cols() == 0) fail(ErrorKind::ShapeMismatch, "loss: empty batch");
}

struct CosineTerms {
  Eigen::ArrayXd dot, pred_norm, target_norm;
};

CosineTerms cosine_terms(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target) {
  CosineTerms t;
  t.dot = pred.cwiseProduct(target).colwise().sum().transpose().array();
  t.pred_norm = pred.colwise().norm().transpose().array();
  t.target_norm = target.colwise().norm().transpose().array();
  if ((t.pred_norm == 0.0).any() || (t.target_norm == 0.0).any())
    fail(ErrorKind::ZeroNormVector, "cosine loss: a prediction or target vector has zero norm");
  return t;
}

// d/dpred of (1/N) sum_i cos_i.
Eigen::MatrixXd cosine_gradient(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target, const CosineTerms& t) {
  const double n = static_cast<double>(pred.cols());
  const Eigen::ArrayXd denom = t.pred_norm * t.target_norm;
  Eigen::MatrixXd g = target;
  for (Eigen::Index i = 0; i < pred.cols(); ++i) {
    const double scale = 1.0 / denom[i];
    const double self = t.dot[i] / (t.pred_norm[i] * t.pred_norm[i] * denom[i]);
    g.col(i) = (target.col(i) * scale - pred.col(i) * self) / n;
  }
  return g;
}

}  // namespace

double loss_cosine(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target) {
  require_batch_shapes(pred, target);
  const CosineTerms t = cosine_terms(pred, target);
  return -(t.dot / (t.pred_norm * t.target_norm)).mean();
}

double loss_combined(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target) {
  require_batch_shapes(pred, target);
  const double mse = (pred - target).array().square().colwise().mean().mean();
  return mse + loss_cosine(pred, target);
}

Var loss_cosine(Var pred, const Eigen::MatrixXd& target) {
  const double value = loss_cosine(pred.value(), target);
  const std::size_t ip = pred.id();
  Eigen::MatrixXd out(1, 1);
  out(0, 0) = value;
  return pred.tape().record(std::move(out), {pred}, [ip, target](Tape& t, std::size_t self) {
    const Eigen::MatrixXd& p = t.value(ip);
    const double g = t.grad(self)(0, 0);
    t.grad(ip) -= g * cosine_gradient(p, target, cosine_terms(p, target));
  });
}

Var loss_combined(Var pred, const Eigen::MatrixXd& target) {
  const double value = loss_combined(pred.value(), target);
  const std::size_t ip = pred.id();
  Eigen::MatrixXd out(1, 1);
  out(0, 0) = value;
  return pred.tape().record(std::move(out), {pred}, [ip, target](Tape& t, std::size_t self) {
    const Eigen::MatrixXd& p = t.value(ip);
    const double g = t.grad(self)(0, 0);
    const double scale = 2.0 / static_cast<double>(p.rows() * p.cols());
    t.grad(ip) += g * (scale * (p - target) - cosine_gradient(p, target, cosine_terms(p, target)));
  });
}

// --- data --------------------------------------------------------------------

Eigen::MatrixXd formant_matrix(std::span<const PairedPhone> pairs, Mode mode) {
  Eigen::MatrixXd m(kFormantRows, static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const PhoneSegment& s = mode == Mode::Whispered ? pairs[i].whispered : pairs[i].phonated;
    for (int f = 0; f < 3; ++f) {
      const ContourVector& v = s.contour(kFormants[f]);
      if (v.space != Space::ZScore)
        fail(ErrorKind::InvalidArgument, "pair " + pairs[i].id + ": model inputs must be z-scored");
      m.col(static_cast<Eigen::Index>(i)).segment(f * kContourPoints, kContourPoints) = v.points;
    }
  }
  return m;
}

Eigen::MatrixXd f0_matrix(std::span<const PairedPhone> pairs) {
  Eigen::MatrixXd m(kContourPoints, static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!pairs[i].phonated.has(Feature::F0))
      fail(ErrorKind::InvalidArgument, "pair " + pairs[i].id + " has no phonated f0 contour");
    const ContourVector& v = pairs[i].phonated.contour(Feature::F0);
    if (v.space != Space::ZScore)
      fail(ErrorKind::InvalidArgument, "pair " + pairs[i].id + ": f0 targets must be z-scored");
    m.col(static_cast<Eigen::Index>(i)) = v.points;
  }
  return m;
}

Eigen::MatrixXd predictor_inputs(const Eigen::MatrixXd& denoised, const Eigen::MatrixXd& whispered) {
  if (denoised.rows() != kFormantRows || whispered.rows() != kFormantRows || denoised.cols() != whispered.cols())
    fail(ErrorKind::ShapeMismatch, "predictor inputs: expected matching 27-row batches");
  Eigen::MatrixXd in(kFormantRows, denoised.cols());
  in.topRows(2 * kContourPoints) = denoised.topRows(2 * kContourPoints);
  in.bottomRows(kContourPoints) = whispered.bottomRows(kContourPoints);
  return in;
}

void validate(const TrainConfig& cfg) {
  if (cfg.epochs < 1) fail(ErrorKind::InvalidConfig, "epochs must be at least 1");
  if (cfg.batch_size < 1) fail(ErrorKind::InvalidConfig, "batch size must be at least 1");
  if (!(cfg.learning_rate > 0.0)) fail(ErrorKind::InvalidConfig, "learning rate must be positive");
  if (!(cfg.recurrent_dropout >= 0.0 && cfg.recurrent_dropout < 1.0))
    fail(ErrorKind::InvalidConfig, "recurrent dropout must lie in [0, 1)");
  const double fractions[] = {cfg.train_fraction, cfg.val_fraction, cfg.test_fraction};
  for (double f : fractions)
    if (!(f >= 0.0 && f <= 1.0)) fail(ErrorKind::InvalidConfig, "split fractions must lie in [0, 1]");
  if (std::abs(cfg.train_fraction + cfg.val_fraction + cfg.test_fraction - 1.0) > 1e-9)
    fail(ErrorKind::InvalidConfig, "split fractions must sum to 1");
}

DataSplit split_dataset(std::span<const PairedPhone> pairs, const TrainConfig& cfg) {
  validate(cfg);
  std::map<std::string, std::vector<std::size_t>> by_speaker;
  for (std::size_t i = 0; i < pairs.size(); ++i) by_speaker[pairs[i].phonated.speaker_id].push_back(i);
  Rng rng(cfg.seed ^ 0x5eed5eed5eedULL);
  DataSplit split;
  for (auto& [speaker, idx] : by_speaker) {
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return pairs[a].id < pairs[b].id; });
    std::shuffle(idx.begin(), idx.end(), rng);
    const std::size_t n = idx.size();
    const auto n_train = std::min(n, static_cast<std::size_t>(std::llround(cfg.train_fraction * double(n))));
    const auto n_val = std::min(n - n_train, static_cast<std::size_t>(std::llround(cfg.val_fraction * double(n))));
    split.train.insert(split.train.end(), idx.begin(), idx.begin() + n_train);
    split.validation.insert(split.validation.end(), idx.begin() + n_train, idx.begin() + n_train + n_val);
    split.test.insert(split.test.end(), idx.begin() + n_train + n_val, idx.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.validation.begin(), split.validation.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::string format_history_csv(std::span<const EpochLosses> history) {
  std::ostringstream os;
  os << "epoch,train_loss,val_loss\n";
  for (const auto& e : history)
    os << e.epoch << ',' << format_double(e.train_loss) << ',' << (std::isnan(e.val_loss) ? "" : format_double(e.val_loss))
       << '\n';
  return os.str();
}

namespace {

Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& m, std::span<const std::size_t> cols) {
  Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = m.col(static_cast<Eigen::Index>(cols[i]));
  return out;
}

void load_parameters(std::vector<Parameter*> params, const ModelCheckpoint& ckpt) {
  if (ckpt.layers.size() != params.size())
    fail(ErrorKind::ArchitectureMismatch, "checkpoint has " + std::to_string(ckpt.layers.size()) +
                                              " arrays, model expects " + std::to_string(params.size()));
  for (Parameter* p : params) p->value = to_matrix(ckpt.layer(p->name), p->value.rows(), p->value.cols());
}

void require_kind(const ModelCheckpoint& ckpt, const std::string& kind) {
  if (ckpt.format_version != ModelCheckpoint::kFormatVersion)
    fail(ErrorKind::ArchitectureMismatch, "unsupported checkpoint format_version " + std::to_string(ckpt.format_version));
  if (ckpt.model_kind != kind)
    fail(ErrorKind::ArchitectureMismatch, "checkpoint holds a '" + ckpt.model_kind + "', expected '" + kind + "'");
}

long arch_value(const ModelCheckpoint& ckpt, const std::string& key) {
  const auto it = ckpt.architecture.find(key);
  if (it == ckpt.architecture.end()) fail(ErrorKind::ArchitectureMismatch, "checkpoint architecture lacks '" + key + "'");
  return it->second;
}

}  // namespace

// --- denoiser ------------------------------------------------------------------

Denoiser::Denoiser(std::uint64_t seed, DenoiserShape shape) : shape_(shape) {
  Rng rng(seed);
  const Eigen::Index c = shape.channels;
  encoder_.emplace_back("encoder.conv1", shape.features, c, shape.kernel, rng);
  encoder_.emplace_back("encoder.conv2", c, c, shape.kernel, rng);
  encoder_.emplace_back("encoder.conv3", c, c, shape.kernel, rng);
  to_embedding_ = LinearLayer("encoder.dense", c * shape.steps, shape.embedding, rng);
  from_embedding_ = LinearLayer("decoder.dense", shape.embedding, c * shape.steps, rng);
  decoder_.emplace_back("decoder.deconv1", c, c, shape.kernel, rng);
  decoder_.emplace_back("decoder.deconv2", c, c, shape.kernel, rng);
  decoder_.emplace_back("decoder.deconv3", c, shape.features, shape.kernel, rng);
}

Var Denoiser::forward(Tape& tape, const Eigen::MatrixXd& batch) const {
  if (batch.rows() != shape_.features * shape_.steps)
    fail(ErrorKind::ShapeMismatch, "denoiser expects " + std::to_string(shape_.features * shape_.steps) + "-row batches");
  const Eigen::Index steps = shape_.steps;
  Var h = unflatten_steps(tape.constant(batch), shape_.features, steps);
  for (const auto& conv : encoder_) h = tanh(conv.forward(tape, h, steps));
  const Var embedding = to_embedding_.forward(tape, flatten_steps(h, steps));
  h = unflatten_steps(tanh(from_embedding_.forward(tape, embedding)), shape_.channels, steps);
  for (std::size_t i = 0; i < decoder_.size(); ++i) {
    h = decoder_[i].forward(tape, h, steps);
    if (i + 1 < decoder_.size()) h = tanh(h);
  }
  return flatten_steps(h, steps);
}

Eigen::MatrixXd Denoiser::denoise(const Eigen::MatrixXd& batch) const {
  Tape tape;
  return forward(tape, batch).value();
}

std::vector<const Parameter*> Denoiser::parameters() const {
  std::vector<const Parameter*> out;
  for (const auto& l : encoder_) out.insert(out.end(), {&l.weight, &l.bias});
  out.insert(out.end(), {&to_embedding_.weight, &to_embedding_.bias, &from_embedding_.weight, &from_embedding_.bias});
  for (const auto& l : decoder_) out.insert(out.end(), {&l.weight, &l.bias});
  return out;
}

std::vector<Parameter*> Denoiser::parameters() {
  std::vector<Parameter*> out;
  for (const Parameter* p : std::as_const(*this).parameters()) out.push_back(const_cast<Parameter*>(p));
  return out;
}

ModelCheckpoint Denoiser::to_checkpoint(const TrainMeta& meta) const {
  ModelCheckpoint ckpt;
  ckpt.model_kind = "denoiser";
  ckpt.architecture = {{"features", shape_.features}, {"steps", shape_.steps}, {"channels", shape_.channels},
                       {"kernel", shape_.kernel},     {"embedding", shape_.embedding}};
  for (const Parameter* p : parameters()) ckpt.layers.push_back(to_named_array(p->name, p->value));
  ckpt.train_meta = meta;
  return ckpt;
}

Denoiser Denoiser::from_checkpoint(const ModelCheckpoint& ckpt) {
  require_kind(ckpt, "denoiser");
  DenoiserShape shape;
  shape.features = arch_value(ckpt, "features");
  shape.steps = arch_value(ckpt, "steps");
  shape.channels = arch_value(ckpt, "channels");
  shape.kernel = arch_value(ckpt, "kernel");
  shape.embedding = arch_value(ckpt, "embedding");
  if (shape.kernel % 2 == 0 || shape.features < 1 || shape.steps < 1 || shape.channels < 1 || shape.embedding < 1)
    fail(ErrorKind::ArchitectureMismatch, "invalid denoiser architecture in checkpoint");
  Denoiser model(0, shape);
  load_parameters(model.parameters(), ckpt);
  return model;
}

// --- predictor ---------------------------------------------------------------

Predictor::Predictor(std::uint64_t seed, PredictorShape shape) : shape_(shape) {
  Rng rng(seed);
  Eigen::Index width = shape.features;
  for (Eigen::Index l = 0; l < shape.layers; ++l) {
    lstm_.emplace_back("lstm" + std::to_string(l + 1), width, shape.hidden, rng);
    width = 2 * shape.hidden;
  }
  readout_ = LinearLayer("readout", width, 1, rng);
}

Var Predictor::forward(Tape& tape, const Eigen::MatrixXd& batch, double recurrent_dropout, bool training,
                       Rng* rng) const {
  const Eigen::Index steps = shape_.steps;
  if (batch.rows() != shape_.features * steps)
    fail(ErrorKind::ShapeMismatch, "predictor expects " + std::to_string(shape_.features * steps) + "-row batches");
  std::vector<Var> seq;
  seq.reserve(static_cast<std::size_t>(steps));
  for (Eigen::Index t = 0; t < steps; ++t) {
    Eigen::MatrixXd x(shape_.features, batch.cols());
    for (Eigen::Index f = 0; f < shape_.features; ++f) x.row(f) = batch.row(f * steps + t);
    seq.push_back(tape.constant(std::move(x)));
  }
  for (const auto& layer : lstm_) seq = layer.forward(tape, seq, recurrent_dropout, training, rng);
  std::vector<Var> out;
  out.reserve(seq.size());
  for (const Var& h : seq) out.push_back(readout_.forward(tape, h));
  return concat_rows(out);
}

Eigen::MatrixXd Predictor::predict(const Eigen::MatrixXd& batch) const {
  Tape tape;
  return forward(tape, batch, 0.0, false, nullptr).value();
}

std::vector<const Parameter*> Predictor::parameters() const {
  std::vector<const Parameter*> out;
  for (const auto& l : lstm_) {
    const auto p = l.parameters();
    out.insert(out.end(), p.begin(), p.end());
  }
  out.insert(out.end(), {&readout_.weight, &readout_.bias});
  return out;
}

std::vector<Parameter*> Predictor::parameters() {
  std::vector<Parameter*> out;
  for (const Parameter* p : std::as_const(*this).parameters()) out.push_back(const_cast<Parameter*>(p));
  return out;
}

ModelCheckpoint Predictor::to_checkpoint(const TrainMeta& meta) const {
  ModelCheckpoint ckpt;
  ckpt.model_kind = "predictor";
  ckpt.architecture = {{"features", shape_.features}, {"steps", shape_.steps}, {"hidden", shape_.hidden},
                       {"layers", shape_.layers}};
  for (const Parameter* p : parameters()) ckpt.layers.push_back(to_named_array(p->name, p->value));
  ckpt.train_meta = meta;
  return ckpt;
}

Predictor Predictor::from_checkpoint(const ModelCheckpoint& ckpt) {
  require_kind(ckpt, "predictor");
  PredictorShape shape;
  shape.features = arch_value(ckpt, "features");
  shape.steps = arch_value(ckpt, "steps");
  shape.hidden = arch_value(ckpt, "hidden");
  shape.layers = arch_value(ckpt, "layers");
  if (shape.features < 1 || shape.steps < 1 || shape.hidden < 1 || shape.layers < 1)
    fail(ErrorKind::ArchitectureMismatch, "invalid predictor architecture in checkpoint");
  Predictor model(0, shape);
  load_parameters(model.parameters(), ckpt);
  return model;
}

// --- training ------------------------------------------------------------------

namespace {

using ForwardFn = std::function<Var(Tape&, const Eigen::MatrixXd&, bool training, Rng& rng)>;
using LossFn = Var (*)(Var, const Eigen::MatrixXd&);

std::vector<EpochLosses> run_training(std::vector<Parameter*> params, const SequenceDataset& data,
                                      const DataSplit& split, const TrainConfig& cfg, const ForwardFn& forward,
                                      LossFn loss, const std::function<void(const EpochLosses&)>& progress) {
  validate(cfg);
  if (split.train.empty()) fail(ErrorKind::EmptyDataset, "no training samples");
  for (const auto* part : {&split.train, &split.validation, &split.test})
    for (std::size_t i : *part)
      if (i >= static_cast<std::size_t>(data.size())) fail(ErrorKind::InvalidArgument, "split index out of range");

  AdamState adam;
  adam.config.learning_rate = cfg.learning_rate;
  Rng shuffle_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  Rng dropout_rng(cfg.seed ^ 0xd1b54a32d192ed03ULL);

  const Eigen::MatrixXd val_inputs = gather_columns(data.inputs, split.validation);
  const Eigen::MatrixXd val_targets = gather_columns(data.targets, split.validation);

  std::vector<std::size_t> order = split.train;
  std::vector<EpochLosses> history;
  std::vector<Eigen::MatrixXd> grads(params.size());
  const auto batch = static_cast<std::size_t>(cfg.batch_size);
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::span<const std::size_t> cols(order.data() + start, std::min(batch, order.size() - start));
      const Eigen::MatrixXd inputs = gather_columns(data.inputs, cols);
      const Eigen::MatrixXd targets = gather_columns(data.targets, cols);
      Tape tape;
      const Var l = loss(forward(tape, inputs, true, dropout_rng), targets);
      const double value = l.value()(0, 0);
      if (!std::isfinite(value)) {
        std::string ids;
        for (std::size_t k = 0; k < cols.size() && k < 8; ++k) ids += (k ? "," : "") + data.ids[cols[k]];
        fail(ErrorKind::NonFiniteLoss, "non-finite loss at epoch " + std::to_string(epoch) + " on batch [" + ids +
                                           (cols.size() > 8 ? ",..." : "") + "]");
      }
      tape.backward(l);
      for (std::size_t p = 0; p < params.size(); ++p) grads[p] = tape.gradient(*params[p]);
      adam_step(params, grads, adam);
      total += value * static_cast<double>(cols.size());
    }
    EpochLosses e;
    e.epoch = epoch;
    e.train_loss = total / static_cast<double>(order.size());
    e.val_loss = std::numeric_limits<double>::quiet_NaN();
    if (val_inputs.cols() > 0) {
      Tape tape;
      Rng unused(0);
      e.val_loss = loss(forward(tape, val_inputs, false, unused), val_targets).value()(0, 0);
    }
    history.push_back(e);
    if (progress) progress(e);
  }
  return history;
}

TrainMeta meta_from(const TrainConfig& cfg, const std::vector<EpochLosses>& history) {
  TrainMeta meta;
  meta.seed = cfg.seed;
  meta.epochs = static_cast<int>(history.size());
  meta.final_train_loss = history.back().train_loss;
  meta.final_val_loss = history.back().val_loss;
  return meta;
}

}  // namespace

SequenceDataset denoiser_dataset(std::span<const PairedPhone> pairs) {
  SequenceDataset d;
  d.inputs = formant_matrix(pairs, Mode::Whispered);
  d.targets = formant_matrix(pairs, Mode::Phonated);
  for (const auto& p : pairs) d.ids.push_back(p.id);
  return d;
}

SequenceDataset predictor_dataset(std::span<const PairedPhone> pairs, const Denoiser& denoiser) {
  SequenceDataset d;
  const Eigen::MatrixXd whispered = formant_matrix(pairs, Mode::Whispered);
  d.inputs = predictor_inputs(denoiser.denoise(whispered), whispered);
  d.targets = f0_matrix(pairs);
  for (const auto& p : pairs) d.ids.push_back(p.id);
  return d;
}

TrainResult<Denoiser> train_denoiser(const SequenceDataset& data, const DataSplit& split, const TrainConfig& cfg,
                                     const std::function<void(const EpochLosses&)>& progress) {
  if (data.size() == 0) fail(ErrorKind::EmptyDataset, "denoiser dataset is empty");
  Denoiser model(cfg.seed);
  const ForwardFn forward = [&model](Tape& tape, const Eigen::MatrixXd& x, bool, Rng&) {
    return model.forward(tape, x);
  };
  auto history = run_training(model.parameters(), data, split, cfg, forward,
                              static_cast<LossFn>(&loss_cosine), progress);
  TrainMeta meta = meta_from(cfg, history);
  return {std::move(model), std::move(history), meta};
}

TrainResult<Predictor> train_predictor(const SequenceDataset& data, const DataSplit& split, const TrainConfig& cfg,
                                       const std::function<void(const EpochLosses&)>& progress) {
  if (data.size() == 0) fail(ErrorKind::EmptyDataset, "predictor dataset is empty");
  Predictor model(cfg.seed);
  const double dropout = cfg.recurrent_dropout;
  const ForwardFn forward = [&model, dropout](Tape& tape, const Eigen::MatrixXd& x, bool training, Rng& rng) {
    return model.forward(tape, x, dropout, training, &rng);
  };
  auto history = run_training(model.parameters(), data, split, cfg, forward,
                              static_cast<LossFn>(&loss_combined), progress);
  TrainMeta meta = meta_from(cfg, history);
  return {std::move(model), std::move(history), meta};
}

TrainResult<Denoiser> train_denoiser(std::span<const PairedPhone> pairs, const TrainConfig& cfg) {
  if (pairs.empty()) fail(ErrorKind::EmptyDataset, "no pairs to train the denoiser on");
  return train_denoiser(denoiser_dataset(pairs), split_dataset(pairs, cfg), cfg);
}

TrainResult<Predictor> train_predictor(std::span<const PairedPhone> pairs, const Denoiser& denoiser,
                                       const TrainConfig& cfg) {
  if (pairs.empty()) fail(ErrorKind::EmptyDataset, "no pairs to train the predictor on");
  return train_predictor(predictor_dataset(pairs, denoiser), split_dataset(pairs, cfg), cfg);
}

std::map<Feature, ContourVector> denoise(const PhoneSegment& whispered, const Denoiser& model) {
  PairedPhone p;
  p.id = whispered.segment_id;
  p.whispered = whispered;
  const Eigen::MatrixXd out = model.denoise(formant_matrix(std::span<const PairedPhone>(&p, 1), Mode::Whispered));
  std::map<Feature, ContourVector> result;
  for (int f = 0; f < 3; ++f) {
    ContourVector v;
    v.feature = kFormants[f];
    v.space = Space::ZScore;
    v.points = out.col(0).segment(f * kContourPoints, kContourPoints);
    result[v.feature] = v;
  }
  return result;
}

ContourVector predict_f0(const Eigen::MatrixXd& inputs, const Predictor& model) {
  if (inputs.cols() != 1) fail(ErrorKind::ShapeMismatch, "predict_f0 takes a single 27 x 1 input");
  ContourVector v;
  v.feature = Feature::F0;
  v.space = Space::ZScore;
  v.points = model.predict(inputs).col(0);
  return v;
}

}  // namespace ipitch
