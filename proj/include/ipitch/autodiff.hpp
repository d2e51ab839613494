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
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

namespace ipitch {

// A named trainable matrix. Gradients live on the tape that used it.
struct Parameter {
  std::string name;
  Eigen::MatrixXd value;
};

class Tape;

// Handle to a node on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  const Eigen::MatrixXd& value() const;
  const Eigen::MatrixXd& grad() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }

  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }

 private:
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

// Reverse-mode tape. Nodes are appended in evaluation order, so the node
// list is already a topological order and backward() walks it in reverse.
class Tape {
 public:
  // Accumulates the upstream gradient of node `self` into its parents.
  using BackwardFn = std::function<void(Tape& tape, std::size_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Eigen::MatrixXd value);
  // Leaf whose gradient is kept (useful for input-gradient checks).
  Var leaf(Eigen::MatrixXd value);
  // Binds a parameter; binding the same parameter twice returns one node.
  Var parameter(const Parameter& p);

  // Records an op result. `parents` decide whether the node needs a gradient.
  Var record(Eigen::MatrixXd value, std::initializer_list<Var> parents, BackwardFn backward);
  Var record(Eigen::MatrixXd value, std::span<const Var> parents, BackwardFn backward);

  // Seeds d(root)/d(root) = 1 and propagates. Throws NonScalarRoot unless
  // root is 1x1. May be called once per tape.
  void backward(Var root);

  const Eigen::MatrixXd& value(std::size_t id) const { return nodes_[id].value; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  // Gradient buffer of a node, allocated on first use.
  Eigen::MatrixXd& grad(std::size_t id);
  const Eigen::MatrixXd& grad(std::size_t id) const;

  // Gradient of a bound parameter after backward(); zero if it was unused.
  Eigen::MatrixXd gradient(const Parameter& p) const;

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Eigen::MatrixXd value;
    Eigen::MatrixXd grad;
    bool requires_grad = false;
    BackwardFn backward;
  };
  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, std::size_t> params_;
  bool done_ = false;
};

// --- elementwise and linear-algebra ops ------------------------------------

Var operator+(Var a, Var b);
Var operator-(Var a, Var b);
Var operator*(double s, Var a);
Var hadamard(Var a, Var b);
Var matmul(Var a, Var b);
// x (n x m) plus a column vector (n x 1) broadcast over columns.
Var add_bias(Var x, Var bias);
Var tanh(Var x);
Var sigmoid(Var x);
// Sum of all entries as a 1x1 node.
Var sum(Var x);
Var square(Var x);

// Row block [start, start + count).
Var row_block(Var x, Eigen::Index start, Eigen::Index count);
Var concat_rows(std::span<const Var> parts);

// Sequence layout helpers. A batch of B sequences with C channels and T
// steps is stored channel-major as C x (B*T), sample b in columns
// [b*T, (b+1)*T). Its flattened form is (C*T) x B with row c*T + t.
Var flatten_steps(Var x, Eigen::Index steps);
Var unflatten_steps(Var x, Eigen::Index channels, Eigen::Index steps);

// Same-padded, stride-1 1-D cross-correlation. `input` is C_in x (B*T),
// `kernels` is C_out x (C_in*K) with column ci*K + k, `bias` is C_out x 1.
// K must be odd. Throws ShapeMismatch.
Var conv1d(Var input, Var kernels, Var bias, Eigen::Index steps);

// Linear adjoint of conv1d for the same kernel tensor, plus bias. `input`
// has C_out rows (the kernel's leading dimension); the result has C_in rows.
Var conv1d_transpose(Var input, Var kernels, Var bias, Eigen::Index steps);

// Patch extraction behind conv1d and its adjoint.
Eigen::MatrixXd im2col(const Eigen::MatrixXd& x, Eigen::Index kernel, Eigen::Index steps);
Eigen::MatrixXd col2im(const Eigen::MatrixXd& patches, Eigen::Index channels, Eigen::Index kernel,
                       Eigen::Index steps);

}  // namespace ipitch
