// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "autodiff/parameters.hpp"

#include <cmath>
#include <cstring>

#include "common/error.hpp"

namespace sacti::ad {

Parameter& ParameterStore::add(const std::string& name, Tensor value) {
  if (name.empty()) fail(ErrorKind::kInvalidArgument, "parameter name must not be empty");
  if (params_.contains(name)) fail(ErrorKind::kInvalidArgument, "duplicate parameter name " + name, name);
  Parameter p;
  p.name = name;
  p.grad = Tensor(value.shape(), 0.0);
  p.value = std::move(value);
  return params_.emplace(name, std::move(p)).first->second;
}

Parameter& ParameterStore::create(const std::string& name, const Shape& shape, Init init, Rng& rng) {
  Tensor value(shape, 0.0);
  switch (init) {
    case Init::kZeros:
      break;
    case Init::kOnes:
      value.fill(1.0);
      break;
    case Init::kXavierUniform: {
      // Last two axes are (fan_in, fan_out); leading axes stack independent maps.
      const std::size_t fan_in = shape.size() >= 2 ? shape[shape.size() - 2] : shape[0];
      const std::size_t fan_out = shape.back();
      const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
      for (auto& v : value.values()) v = rng.uniform(-bound, bound);
      break;
    }
    case Init::kEmbedding:
      for (auto& v : value.values()) v = rng.normal(0.0, 0.02);
      break;
  }
  return add(name, std::move(value));
}

Parameter& ParameterStore::get(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) fail(ErrorKind::kNotFound, "unknown parameter " + name, name);
  return it->second;
}

const Parameter& ParameterStore::get(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) fail(ErrorKind::kNotFound, "unknown parameter " + name, name);
  return it->second;
}

const Parameter* ParameterStore::find(const std::string& name) const {
  auto it = params_.find(name);
  return it == params_.end() ? nullptr : &it->second;
}

std::vector<std::string> ParameterStore::names() const {
  std::vector<std::string> out;
  out.reserve(params_.size());
  for (const auto& [name, _] : params_) out.push_back(name);
  return out;
}

std::size_t ParameterStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [_, p] : params_) n += p.value.size();
  return n;
}

void ParameterStore::zero_grad() {
  for (auto& [_, p] : params_) p.grad.fill(0.0);
}

namespace {
bool bit_equal(const Tensor& a, const Tensor& b) {
  return a.shape() == b.shape() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}
}  // namespace

bool identical(const ParameterStore& a, const ParameterStore& b) {
  if (a.seed() != b.seed() || a.step() != b.step() || a.size() != b.size()) return false;
  auto ib = b.begin();
  for (auto ia = a.begin(); ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first || !bit_equal(ia->second.value, ib->second.value)) return false;
  }
  if (a.slots().size() != b.slots().size()) return false;
  auto sb = b.slots().begin();
  for (auto sa = a.slots().begin(); sa != a.slots().end(); ++sa, ++sb) {
    if (sa->first != sb->first || !bit_equal(sa->second.first_moment, sb->second.first_moment) ||
        !bit_equal(sa->second.second_moment, sb->second.second_moment)) {
      return false;
    }
  }
  return true;
}

}  // namespace sacti::ad
