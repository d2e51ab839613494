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

#include "ipitch/autodiff.hpp"

#include <string>

#include "ipitch/error.hpp"

namespace ipitch {

const Eigen::MatrixXd& Var::value() const { return tape_->value(id_); }
const Eigen::MatrixXd& Var::grad() const { return tape_->grad(id_); }

Var Tape::constant(Eigen::MatrixXd value) {
  nodes_.push_back({std::move(value), {}, false, {}});
  return {this, nodes_.size() - 1};
}

Var Tape::leaf(Eigen::MatrixXd value) {
  nodes_.push_back({std::move(value), {}, true, {}});
  return {this, nodes_.size() - 1};
}

Var Tape::parameter(const Parameter& p) {
  if (const auto it = params_.find(&p); it != params_.end()) return {this, it->second};
  const Var v = leaf(p.value);
  params_.emplace(&p, v.id());
  return v;
}

Var Tape::record(Eigen::MatrixXd value, std::initializer_list<Var> parents, BackwardFn backward) {
  return record(std::move(value), std::span<const Var>(parents.begin(), parents.size()), std::move(backward));
}

Var Tape::record(Eigen::MatrixXd value, std::span<const Var> parents, BackwardFn backward) {
  bool needs = false;
  for (const Var& p : parents) needs = needs || nodes_[p.id()].requires_grad;
  nodes_.push_back({std::move(value), {}, needs, needs ? std::move(backward) : BackwardFn{}});
  return {this, nodes_.size() - 1};
}

Eigen::MatrixXd& Tape::grad(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.size() == 0 && n.value.size() != 0) n.grad = Eigen::MatrixXd::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

const Eigen::MatrixXd& Tape::grad(std::size_t id) const { return nodes_[id].grad; }

void Tape::backward(Var root) {
  if (root.rows() != 1 || root.cols() != 1)
    fail(ErrorKind::NonScalarRoot, "backward needs a 1x1 root, got " + std::to_string(root.rows()) + "x" +
                                       std::to_string(root.cols()));
  if (done_) fail(ErrorKind::InvalidArgument, "backward already ran on this tape");
  done_ = true;
  grad(root.id())(0, 0) += 1.0;
  for (std::size_t i = root.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.backward || n.grad.size() == 0) continue;
    n.backward(*this, i);
  }
}

Eigen::MatrixXd Tape::gradient(const Parameter& p) const {
  const auto it = params_.find(&p);
  if (it == params_.end() || nodes_[it->second].grad.size() == 0)
    return Eigen::MatrixXd::Zero(p.value.rows(), p.value.cols());
  return nodes_[it->second].grad;
}

namespace {

void require_same_shape(const Var& a, const Var& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail(ErrorKind::ShapeMismatch, std::string(op) + ": " + std::to_string(a.rows()) + "x" +
                                       std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                                       std::to_string(b.cols()));
}

// Adds `delta` to the gradient of `id` if that node tracks one.
template <typename Expr>
void accumulate(Tape& tape, std::size_t id, const Expr& delta) {
  if (tape.requires_grad(id)) tape.grad(id) += delta;
}

}  // namespace

Var operator+(Var a, Var b) {
  require_same_shape(a, b, "add");
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(a.value() + b.value(), {a, b}, [ia, ib](Tape& t, std::size_t self) {
    accumulate(t, ia, t.grad(self));
    accumulate(t, ib, t.grad(self));
  });
}

Var operator-(Var a, Var b) {
  require_same_shape(a, b, "sub");
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(a.value() - b.value(), {a, b}, [ia, ib](Tape& t, std::size_t self) {
    accumulate(t, ia, t.grad(self));
    accumulate(t, ib, -t.grad(self));
  });
}

Var operator*(double s, Var a) {
  const std::size_t ia = a.id();
  return a.tape().record(s * a.value(), {a}, [ia, s](Tape& t, std::size_t self) {
    accumulate(t, ia, s * t.grad(self));
  });
}

Var hadamard(Var a, Var b) {
  require_same_shape(a, b, "hadamard");
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(a.value().cwiseProduct(b.value()), {a, b}, [ia, ib](Tape& t, std::size_t self) {
    accumulate(t, ia, t.grad(self).cwiseProduct(t.value(ib)));
    accumulate(t, ib, t.grad(self).cwiseProduct(t.value(ia)));
  });
}

// Forward products are coefficient-based so a column never depends on how
// many other columns share the batch.
Var matmul(Var a, Var b) {
  if (a.cols() != b.rows())
    fail(ErrorKind::ShapeMismatch, "matmul: inner dimensions " + std::to_string(a.cols()) + " and " +
                                       std::to_string(b.rows()));
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(a.value().lazyProduct(b.value()), {a, b}, [ia, ib](Tape& t, std::size_t self) {
    if (t.requires_grad(ia)) t.grad(ia).noalias() += t.grad(self) * t.value(ib).transpose();
    if (t.requires_grad(ib)) t.grad(ib).noalias() += t.value(ia).transpose() * t.grad(self);
  });
}

Var add_bias(Var x, Var bias) {
  if (bias.cols() != 1 || bias.rows() != x.rows())
    fail(ErrorKind::ShapeMismatch, "add_bias: bias must be a column matching the rows of x");
  const std::size_t ix = x.id(), ib = bias.id();
  Eigen::MatrixXd out = x.value();
  out.colwise() += bias.value().col(0);
  return x.tape().record(std::move(out), {x, bias}, [ix, ib](Tape& t, std::size_t self) {
    accumulate(t, ix, t.grad(self));
    accumulate(t, ib, t.grad(self).rowwise().sum());
  });
}

Var tanh(Var x) {
  const std::size_t ix = x.id();
  Eigen::MatrixXd out = x.value().array().tanh().matrix();
  return x.tape().record(std::move(out), {x}, [ix](Tape& t, std::size_t self) {
    const auto& y = t.value(self).array();
    accumulate(t, ix, (t.grad(self).array() * (1.0 - y.square())).matrix());
  });
}

Var sigmoid(Var x) {
  const std::size_t ix = x.id();
  Eigen::MatrixXd out = (1.0 / (1.0 + (-x.value().array()).exp())).matrix();
  return x.tape().record(std::move(out), {x}, [ix](Tape& t, std::size_t self) {
    const auto& y = t.value(self).array();
    accumulate(t, ix, (t.grad(self).array() * y * (1.0 - y)).matrix());
  });
}

Var sum(Var x) {
  const std::size_t ix = x.id();
  Eigen::MatrixXd out(1, 1);
  out(0, 0) = x.value().sum();
  return x.tape().record(std::move(out), {x}, [ix](Tape& t, std::size_t self) {
    const double g = t.grad(self)(0, 0);
    if (t.requires_grad(ix)) t.grad(ix).array() += g;
  });
}

Var square(Var x) {
  const std::size_t ix = x.id();
  return x.tape().record(x.value().array().square().matrix(), {x}, [ix](Tape& t, std::size_t self) {
    accumulate(t, ix, (2.0 * t.grad(self).array() * t.value(ix).array()).matrix());
  });
}

Var row_block(Var x, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > x.rows())
    fail(ErrorKind::ShapeMismatch, "row_block out of range");
  const std::size_t ix = x.id();
  return x.tape().record(x.value().middleRows(start, count), {x}, [ix, start, count](Tape& t, std::size_t self) {
    if (t.requires_grad(ix)) t.grad(ix).middleRows(start, count) += t.grad(self);
  });
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) fail(ErrorKind::ShapeMismatch, "concat_rows of nothing");
  const Eigen::Index cols = parts.front().cols();
  Eigen::Index rows = 0;
  for (const Var& p : parts) {
    if (p.cols() != cols) fail(ErrorKind::ShapeMismatch, "concat_rows: column counts differ");
    rows += p.rows();
  }
  Eigen::MatrixXd out(rows, cols);
  std::vector<std::size_t> ids;
  std::vector<Eigen::Index> offsets;
  Eigen::Index r = 0;
  for (const Var& p : parts) {
    out.middleRows(r, p.rows()) = p.value();
    ids.push_back(p.id());
    offsets.push_back(r);
    r += p.rows();
  }
  return parts.front().tape().record(std::move(out), parts, [ids, offsets](Tape& t, std::size_t self) {
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (!t.requires_grad(ids[k])) continue;
      t.grad(ids[k]) += t.grad(self).middleRows(offsets[k], t.value(ids[k]).rows());
    }
  });
}

namespace {

Eigen::MatrixXd flatten_matrix(const Eigen::MatrixXd& x, Eigen::Index steps) {
  const Eigen::Index channels = x.rows();
  const Eigen::Index batch = x.cols() / steps;
  Eigen::MatrixXd out(channels * steps, batch);
  for (Eigen::Index b = 0; b < batch; ++b)
    for (Eigen::Index c = 0; c < channels; ++c)
      out.col(b).segment(c * steps, steps) = x.row(c).segment(b * steps, steps).transpose();
  return out;
}

Eigen::MatrixXd unflatten_matrix(const Eigen::MatrixXd& x, Eigen::Index channels, Eigen::Index steps) {
  const Eigen::Index batch = x.cols();
  Eigen::MatrixXd out(channels, batch * steps);
  for (Eigen::Index b = 0; b < batch; ++b)
    for (Eigen::Index c = 0; c < channels; ++c)
      out.row(c).segment(b * steps, steps) = x.col(b).segment(c * steps, steps).transpose();
  return out;
}

}  // namespace

Var flatten_steps(Var x, Eigen::Index steps) {
  if (steps <= 0 || x.cols() % steps != 0) fail(ErrorKind::ShapeMismatch, "flatten_steps: columns not a multiple of steps");
  const std::size_t ix = x.id();
  const Eigen::Index channels = x.rows();
  return x.tape().record(flatten_matrix(x.value(), steps), {x}, [ix, channels, steps](Tape& t, std::size_t self) {
    accumulate(t, ix, unflatten_matrix(t.grad(self), channels, steps));
  });
}

Var unflatten_steps(Var x, Eigen::Index channels, Eigen::Index steps) {
  if (x.rows() != channels * steps) fail(ErrorKind::ShapeMismatch, "unflatten_steps: rows != channels * steps");
  const std::size_t ix = x.id();
  return x.tape().record(unflatten_matrix(x.value(), channels, steps), {x}, [ix, steps](Tape& t, std::size_t self) {
    accumulate(t, ix, flatten_matrix(t.grad(self), steps));
  });
}

Eigen::MatrixXd im2col(const Eigen::MatrixXd& x, Eigen::Index kernel, Eigen::Index steps) {
  const Eigen::Index channels = x.rows();
  const Eigen::Index batch = x.cols() / steps;
  const Eigen::Index pad = kernel / 2;
  Eigen::MatrixXd patches = Eigen::MatrixXd::Zero(channels * kernel, x.cols());
  for (Eigen::Index c = 0; c < channels; ++c) {
    for (Eigen::Index k = 0; k < kernel; ++k) {
      const Eigen::Index offset = k - pad;
      const Eigen::Index t0 = std::max<Eigen::Index>(0, -offset);
      const Eigen::Index len = steps - std::abs(offset);
      if (len <= 0) continue;
      for (Eigen::Index b = 0; b < batch; ++b)
        patches.row(c * kernel + k).segment(b * steps + t0, len) = x.row(c).segment(b * steps + t0 + offset, len);
    }
  }
  return patches;
}

Eigen::MatrixXd col2im(const Eigen::MatrixXd& patches, Eigen::Index channels, Eigen::Index kernel,
                       Eigen::Index steps) {
  const Eigen::Index batch = patches.cols() / steps;
  const Eigen::Index pad = kernel / 2;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(channels, patches.cols());
  for (Eigen::Index c = 0; c < channels; ++c) {
    for (Eigen::Index k = 0; k < kernel; ++k) {
      const Eigen::Index offset = k - pad;
      const Eigen::Index t0 = std::max<Eigen::Index>(0, -offset);
      const Eigen::Index len = steps - std::abs(offset);
      if (len <= 0) continue;
      for (Eigen::Index b = 0; b < batch; ++b)
        x.row(c).segment(b * steps + t0 + offset, len) += patches.row(c * kernel + k).segment(b * steps + t0, len);
    }
  }
  return x;
}

namespace {

Eigen::Index kernel_width(const Var& kernels, Eigen::Index channels, const char* op) {
  if (channels <= 0 || kernels.cols() % channels != 0)
    fail(ErrorKind::ShapeMismatch, std::string(op) + ": kernel columns not a multiple of the channel count");
  const Eigen::Index k = kernels.cols() / channels;
  if (k % 2 == 0) fail(ErrorKind::ShapeMismatch, std::string(op) + ": kernel length must be odd");
  return k;
}

}  // namespace

Var conv1d(Var input, Var kernels, Var bias, Eigen::Index steps) {
  if (steps <= 0 || input.cols() % steps != 0) fail(ErrorKind::ShapeMismatch, "conv1d: columns not a multiple of steps");
  const Eigen::Index in_ch = input.rows();
  const Eigen::Index k = kernel_width(kernels, in_ch, "conv1d");
  if (bias.rows() != kernels.rows() || bias.cols() != 1) fail(ErrorKind::ShapeMismatch, "conv1d: bias shape");

  Eigen::MatrixXd patches = im2col(input.value(), k, steps);
  Eigen::MatrixXd out = kernels.value().lazyProduct(patches);
  out.colwise() += bias.value().col(0);
  const std::size_t ix = input.id(), iw = kernels.id(), ib = bias.id();
  return input.tape().record(
      std::move(out), {input, kernels, bias},
      [ix, iw, ib, in_ch, k, steps, patches = std::move(patches)](Tape& t, std::size_t self) {
        const Eigen::MatrixXd& g = t.grad(self);
        if (t.requires_grad(iw)) t.grad(iw).noalias() += g * patches.transpose();
        accumulate(t, ib, g.rowwise().sum());
        if (t.requires_grad(ix)) t.grad(ix) += col2im(t.value(iw).transpose() * g, in_ch, k, steps);
      });
}

Var conv1d_transpose(Var input, Var kernels, Var bias, Eigen::Index steps) {
  if (steps <= 0 || input.cols() % steps != 0)
    fail(ErrorKind::ShapeMismatch, "conv1d_transpose: columns not a multiple of steps");
  if (kernels.rows() != input.rows()) fail(ErrorKind::ShapeMismatch, "conv1d_transpose: kernel rows != input channels");
  const Eigen::Index out_ch = bias.rows();
  const Eigen::Index k = kernel_width(kernels, out_ch, "conv1d_transpose");
  if (bias.cols() != 1) fail(ErrorKind::ShapeMismatch, "conv1d_transpose: bias shape");

  Eigen::MatrixXd out = col2im(kernels.value().transpose().lazyProduct(input.value()), out_ch, k, steps);
  out.colwise() += bias.value().col(0);
  const std::size_t ix = input.id(), iw = kernels.id(), ib = bias.id();
  return input.tape().record(std::move(out), {input, kernels, bias}, [ix, iw, ib, k, steps](Tape& t, std::size_t self) {
    const Eigen::MatrixXd& g = t.grad(self);
    const Eigen::MatrixXd patches = im2col(g, k, steps);
    accumulate(t, ib, g.rowwise().sum());
    if (t.requires_grad(ix)) t.grad(ix).noalias() += t.value(iw) * patches;
    if (t.requires_grad(iw)) t.grad(iw).noalias() += t.value(ix) * patches.transpose();
  });
}

}  // namespace ipitch
