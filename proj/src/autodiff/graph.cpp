// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "autodiff/graph.hpp"

#include "common/error.hpp"

namespace sacti::ad {

const Tensor& Var::value() const { return graph_->value(index_); }
const Tensor& Var::grad() const { return graph_->grad(index_); }
bool Var::requires_grad() const { return graph_->requires_grad(index_); }

Graph::Graph() : rng_(0) {}

Graph::Graph(ParameterStore& store, bool training, std::uint64_t dropout_seed)
    : store_(&store), training_(training), rng_(dropout_seed) {}

Graph::Graph(const ParameterStore& store) : frozen_(&store), rng_(0) {}

std::uint32_t Graph::push(Node node) {
  nodes_.push_back(std::move(node));
  return static_cast<std::uint32_t>(nodes_.size() - 1);
}

const Tensor& Graph::value(std::uint32_t index) const {
  const Node& n = nodes_[index];
  return n.external ? *n.external : n.value;
}

Var Graph::constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  return Var(this, push(std::move(n)));
}

Var Graph::variable(Tensor value) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = true;
  return Var(this, push(std::move(n)));
}

Var Graph::param(const std::string& name) {
  if (auto it = bound_.find(name); it != bound_.end()) return it->second;
  Node n;
  if (store_) {
    n.external = &store_->get(name).value;
    n.requires_grad = true;
  } else if (frozen_) {
    n.external = &frozen_->get(name).value;
  } else {
    fail(ErrorKind::kContract, "graph has no parameter store; cannot bind " + name, name);
  }
  Var v(this, push(std::move(n)));
  bound_.emplace(name, v);
  return v;
}

Var Graph::record(Tensor value, std::span<const Var> inputs, BackwardFn fn) {
  if (backward_done_) fail(ErrorKind::kContract, "graph already differentiated; build a new graph");
  Node n;
  n.value = std::move(value);
  for (const Var& in : inputs) {
    if (&in.graph() != this) fail(ErrorKind::kContract, "op inputs belong to different graphs");
    n.requires_grad = n.requires_grad || nodes_[in.index()].requires_grad;
  }
  if (n.requires_grad) n.backward = std::move(fn);
  return Var(this, push(std::move(n)));
}

Tensor& Graph::grad_buffer(std::uint32_t index) {
  Node& n = nodes_[index];
  if (n.grad.empty()) n.grad = Tensor(value(index).shape(), 0.0);
  return n.grad;
}

void Graph::backward(Var loss) {
  if (backward_done_) fail(ErrorKind::kContract, "backward called twice on the same graph");
  if (&loss.graph() != this) fail(ErrorKind::kContract, "loss belongs to a different graph");
  if (loss.value().size() != 1) {
    fail(ErrorKind::kContract, "backward needs a scalar loss, got shape " + shape_str(loss.shape()));
  }
  backward_done_ = true;
  if (!nodes_[loss.index()].requires_grad) return;
  grad_buffer(loss.index()).fill(1.0);
  for (std::int64_t i = loss.index(); i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.requires_grad && n.backward && !n.grad.empty()) n.backward(*this, n.grad);
  }
  if (store_) {
    for (const auto& [name, var] : bound_) {
      const Tensor& g = nodes_[var.index()].grad;
      if (g.empty()) continue;
      Tensor& dst = store_->get(name).grad;
      for (std::size_t k = 0; k < g.size(); ++k) dst[k] += g[k];
    }
  }
}

}  // namespace sacti::ad
