// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "autodiff/parameters.hpp"
#include "autodiff/rng.hpp"
#include "autodiff/tensor.hpp"

namespace sacti::ad {

class Graph;

// Handle to a node of a Graph. Cheap to copy; valid while its Graph lives.
class Var {
 public:
  Var() = default;
  Var(Graph* graph, std::uint32_t index) : graph_(graph), index_(index) {}

  Graph& graph() const { return *graph_; }
  std::uint32_t index() const { return index_; }
  bool valid() const { return graph_ != nullptr; }

  const Tensor& value() const;
  const Tensor& grad() const;
  const Shape& shape() const { return value().shape(); }
  bool requires_grad() const;

 private:
  Graph* graph_ = nullptr;
  std::uint32_t index_ = 0;
};

// Tape for one forward pass. Nodes are appended in execution order, so the
// reverse of the node vector is a valid backward order. A graph supports a
// single backward call.
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, const Tensor& out_grad)>;

  // Free-standing graph with no parameter store, eval mode.
  Graph();
  // Training graph: gradients of parameters accumulate into `store`.
  Graph(ParameterStore& store, bool training, std::uint64_t dropout_seed);
  // Inference over a frozen store; parameters are constants.
  explicit Graph(const ParameterStore& store);

  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor value);
  Var variable(Tensor value);
  Var param(const std::string& name);

  bool training() const { return training_; }
  Rng& rng() { return rng_; }
  std::size_t size() const { return nodes_.size(); }

  void backward(Var loss);

  const Tensor& value(std::uint32_t index) const;
  const Tensor& grad(std::uint32_t index) const { return nodes_[index].grad; }
  bool requires_grad(std::uint32_t index) const { return nodes_[index].requires_grad; }

  // Op authoring: the node requires grad iff any input does.
  Var record(Tensor value, std::span<const Var> inputs, BackwardFn fn);
  Var record(Tensor value, std::initializer_list<Var> inputs, BackwardFn fn) {
    return record(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()), std::move(fn));
  }
  // Zero-initialized on first access.
  Tensor& grad_buffer(std::uint32_t index);

 private:
  struct Node {
    Tensor value;
    const Tensor* external = nullptr;  // parameter value owned by the store
    Tensor grad;
    bool requires_grad = false;
    BackwardFn backward;
  };

  std::uint32_t push(Node node);

  std::vector<Node> nodes_;
  ParameterStore* store_ = nullptr;
  const ParameterStore* frozen_ = nullptr;
  std::map<std::string, Var> bound_;
  bool training_ = false;
  bool backward_done_ = false;
  Rng rng_;
};

// --- differentiable ops -----------------------------------------------------
// Shapes use row-major conventions; "rows" is axis 0 of a matrix.

Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);
// a[m x n] + b[n] (or b[1 x n]) broadcast across rows.
Var add_row(Var a, Var b);
// Adds a non-differentiable tensor of identical shape (masks may hold -inf).
Var add_constant(Var a, const Tensor& c);
Var tanh(Var a);
Var relu(Var a);
Var softmax(Var a, std::size_t axis);
// Along the last axis of a matrix or vector.
Var log_softmax(Var a);
// Mean negative log-likelihood of `targets` under row-wise softmax.
Var cross_entropy(Var logits, std::span<const int> targets);
// Normalizes each row, then applies gamma[n], beta[n].
Var layer_norm(Var x, Var gamma, Var beta, double eps = 1e-5);
// Inverted dropout; identity outside training or when rate == 0.
Var dropout(Var x, double rate);
Var embedding(Var table, std::span<const int> ids);
Var transpose(Var a);
Var reshape(Var a, Shape shape);
Var slice_rows(Var a, std::size_t begin, std::size_t count);
Var slice_cols(Var a, std::size_t begin, std::size_t count);
Var concat_rows(std::span<const Var> parts);
Var concat_cols(std::span<const Var> parts);
Var gather_rows(Var a, std::span<const std::size_t> rows);
// Row i of the result is the mean of a's rows within spans[i].
Var span_mean(Var a, std::span<const PieceSpan> spans);
Var sum(Var a);
Var mean(Var a);
// out[i] = a[i, cols[i]].
Var pick(Var a, std::span<const int> cols);
// out[i, j, r] = sum_ab x[i, a] * u[r, a, b] * y[j, b]; x[n x A], u[R x A x B], y[m x B].
Var bilinear(Var x, Var u, Var y);

}  // namespace sacti::ad
