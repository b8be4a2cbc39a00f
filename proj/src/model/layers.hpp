// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "autodiff/graph.hpp"

namespace sacti::model {

// Components hold parameter names only; values live in the ParameterStore
// the graph was built over. `init` registers freshly initialized parameters.

// y = x W + b, W[in x out].
struct Linear {
  std::string weight;
  std::string bias;
  std::size_t in = 0;
  std::size_t out = 0;

  Linear() = default;
  Linear(const std::string& prefix, std::size_t in, std::size_t out);

  void init(ad::ParameterStore& store, ad::Rng& rng) const;
  ad::Var operator()(ad::Graph& g, ad::Var x) const;
};

// Stack of Linear + ReLU layers with dropout after every activation.
struct Mlp {
  std::vector<Linear> layers;
  double dropout = 0.0;

  Mlp() = default;
  Mlp(const std::string& prefix, std::size_t in, const std::vector<std::size_t>& dims, double dropout);

  void init(ad::ParameterStore& store, ad::Rng& rng) const;
  ad::Var operator()(ad::Graph& g, ad::Var x) const;
  std::size_t out_dim() const { return layers.back().out; }
};

}  // namespace sacti::model
