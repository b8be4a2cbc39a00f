// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "autodiff/rng.hpp"
#include "autodiff/tensor.hpp"

namespace sacti::ad {

enum class Init {
  kZeros,
  kOnes,
  kXavierUniform,  // weight matrices and biaffine stacks
  kEmbedding,      // N(0, 0.02)
};

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;  // always allocated, same shape as value
};

// Per-parameter optimizer slots (Adam moments).
struct OptimizerSlots {
  Tensor first_moment;
  Tensor second_moment;

  friend bool operator==(const OptimizerSlots&, const OptimizerSlots&) = default;
};

// Every trainable tensor of a model, keyed by dotted path. Node-based map so
// Parameter addresses stay valid while the store is alive.
class ParameterStore {
 public:
  ParameterStore() = default;
  explicit ParameterStore(std::uint64_t seed) : seed_(seed) {}

  Parameter& add(const std::string& name, Tensor value);
  Parameter& create(const std::string& name, const Shape& shape, Init init, Rng& rng);

  Parameter& get(const std::string& name);
  const Parameter& get(const std::string& name) const;
  const Parameter* find(const std::string& name) const;
  bool contains(const std::string& name) const { return params_.contains(name); }

  std::vector<std::string> names() const;
  std::size_t size() const { return params_.size(); }
  std::size_t scalar_count() const;

  void zero_grad();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t step() const { return step_; }
  void set_step(std::uint64_t step) { step_ = step; }

  std::map<std::string, OptimizerSlots>& slots() { return slots_; }
  const std::map<std::string, OptimizerSlots>& slots() const { return slots_; }

  std::map<std::string, Parameter>::iterator begin() { return params_.begin(); }
  std::map<std::string, Parameter>::iterator end() { return params_.end(); }
  std::map<std::string, Parameter>::const_iterator begin() const { return params_.begin(); }
  std::map<std::string, Parameter>::const_iterator end() const { return params_.end(); }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t step_ = 0;
  std::map<std::string, Parameter> params_;
  std::map<std::string, OptimizerSlots> slots_;
};

// Same names, shapes, values, step, seed and optimizer slots.
bool identical(const ParameterStore& a, const ParameterStore& b);

}  // namespace sacti::ad
