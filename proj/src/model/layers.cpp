// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "model/layers.hpp"

#include "common/error.hpp"

namespace sacti::model {

Linear::Linear(const std::string& prefix, std::size_t in, std::size_t out)
    : weight(prefix + ".w"), bias(prefix + ".b"), in(in), out(out) {}

void Linear::init(ad::ParameterStore& store, ad::Rng& rng) const {
  store.create(weight, {in, out}, ad::Init::kXavierUniform, rng);
  store.create(bias, {out}, ad::Init::kZeros, rng);
}

ad::Var Linear::operator()(ad::Graph& g, ad::Var x) const {
  return ad::add_row(ad::matmul(x, g.param(weight)), g.param(bias));
}

Mlp::Mlp(const std::string& prefix, std::size_t in, const std::vector<std::size_t>& dims, double dropout)
    : dropout(dropout) {
  if (dims.empty()) fail(ErrorKind::kInvalidArgument, "MLP " + prefix + " needs at least one layer");
  std::size_t width = in;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    layers.emplace_back(prefix + ".l" + std::to_string(i), width, dims[i]);
    width = dims[i];
  }
}

void Mlp::init(ad::ParameterStore& store, ad::Rng& rng) const {
  for (const auto& l : layers) l.init(store, rng);
}

ad::Var Mlp::operator()(ad::Graph& g, ad::Var x) const {
  for (const auto& l : layers) x = ad::dropout(ad::relu(l(g, x)), dropout);
  return x;
}

}  // namespace sacti::model
