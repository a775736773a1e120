// Copyright 2026 The cgg Authors.
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

// Tape-based reverse-mode differentiation over 2-D tensors.
//
// A Graph records every op in creation order. backward() walks the tape once
// in reverse, so each op's backward runs exactly once and gradients flowing
// into a node from several consumers add up. Parameters enter a graph as
// leaves; their gradients are read out with accumulate_param_grads(), which
// keeps a Graph independent of any shared gradient buffer. Every op checks
// its output for NaN/Inf and throws NumericError naming the op.

#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "cgg/numcore/tensor.hpp"

namespace cgg::num {

struct Parameter {
  std::string name;
  Tensor value;
  std::size_t slot = 0;
};

/// Named learnable tensors in registration order.
class ParameterStore {
 public:
  /// Throws UsageError on a duplicate name.
  std::size_t add(const std::string& name, Tensor init);
  /// Registers a tensor filled from normal(0, stddev).
  std::size_t add_normal(const std::string& name, Shape shape, double stddev, std::mt19937_64& rng);

  std::size_t size() const { return params_.size(); }
  Parameter& operator[](std::size_t slot) { return params_[slot]; }
  const Parameter& operator[](std::size_t slot) const { return params_[slot]; }
  /// Throws UsageError if absent.
  std::size_t slot_of(const std::string& name) const;
  bool contains(const std::string& name) const { return by_name_.contains(name); }

  std::vector<Parameter>::iterator begin() { return params_.begin(); }
  std::vector<Parameter>::iterator end() { return params_.end(); }
  std::vector<Parameter>::const_iterator begin() const { return params_.begin(); }
  std::vector<Parameter>::const_iterator end() const { return params_.end(); }

  /// Zero tensors shaped like every parameter, indexed by slot.
  std::vector<Tensor> zero_grads() const;
  std::size_t num_values() const;

  bool operator==(const ParameterStore& other) const;

 private:
  std::vector<Parameter> params_;
  std::map<std::string, std::size_t> by_name_;
};

/// Gradient buffers indexed by parameter slot.
using Gradients = std::vector<Tensor>;

struct Var {
  std::size_t id = 0;
};

class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor value);
  /// Refers to p.value without copying; `p` must outlive the graph and stay
  /// unchanged while the graph is in use.
  Var param(const Parameter& p);

  const Tensor& value(Var v) const {
    const Node& n = nodes_[v.id];
    return n.external ? *n.external : n.value;
  }
  /// Valid after backward(); zero-sized for nodes that need no gradient.
  const Tensor& grad(Var v) const { return nodes_[v.id].grad; }
  std::size_t num_nodes() const { return nodes_.size(); }

  Var matmul(Var a, Var b);     // a[m,k] b[k,n]
  Var matmul_nt(Var a, Var b);  // a[m,k] b[n,k]^T
  Var add(Var a, Var b);
  /// a[m,n] + row[1,n] broadcast over rows.
  Var add_row(Var a, Var row);
  Var scale(Var a, double s);
  /// tanh-approximated GELU.
  Var gelu(Var a);
  /// Per-row normalization with gain/bias rows of length n.
  Var layer_norm(Var x, Var gain, Var bias, double eps = 1e-5);
  Var softmax_rows(Var x);
  /// x / sqrt(|x|^2 + eps) per row.
  Var l2_normalize_rows(Var x, double eps = 1e-12);
  Var gather_rows(Var x, const std::vector<std::size_t>& rows);
  Var concat_rows(const std::vector<Var>& parts);
  Var slice_cols(Var x, std::size_t start, std::size_t len);
  Var concat_cols(const std::vector<Var>& parts);

  /// Soft-target cross-entropy over masked entries, as a [1,1] scalar:
  ///   -(1/norm) * sum_i sum_j weight(i,j) * log softmax_{mask(i,:)}(logits(i,:))_j
  /// `mask` entries are 0 or 1; weights outside the mask must be zero; rows
  /// with an empty mask must carry no weight.
  Var soft_target_xent(Var logits, const Tensor& mask, const Tensor& weights, double norm);

  /// Scalar value of a [1,1] node.
  double scalar(Var v) const;

  /// Reverse pass from a [1,1] node. May be called once per graph.
  void backward(Var loss);
  /// grads[slot] += d loss / d param for every parameter leaf.
  void accumulate_param_grads(Gradients& grads) const;

 private:
  struct Node {
    Tensor value;
    const Tensor* external = nullptr;
    Tensor grad;
    bool requires_grad = false;
    long param_slot = -1;
    std::function<void(Graph&, std::size_t)> backward;
  };

  Var push(Tensor value, std::vector<Var> inputs, const char* op,
           std::function<void(Graph&, std::size_t)> backward);
  Node& node(Var v) { return nodes_[v.id]; }
  bool needs(Var v) const { return nodes_[v.id].requires_grad; }
  Tensor& grad_of(Var v) { return nodes_[v.id].grad; }

  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

}  // namespace cgg::num
