// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "autodiff/optimizer.hpp"

#include <cmath>

#include "common/error.hpp"

namespace sacti::ad {

OptimizerKind parse_optimizer_kind(const std::string& name) {
  if (name == "adam") return OptimizerKind::kAdam;
  if (name == "sgd") return OptimizerKind::kSgd;
  fail(ErrorKind::kInvalidArgument, "unknown optimizer '" + name + "' (expected adam|sgd)", "optimizer.kind");
}

std::string to_string(OptimizerKind kind) { return kind == OptimizerKind::kAdam ? "adam" : "sgd"; }

LrSchedule parse_lr_schedule(const std::string& name) {
  if (name == "constant") return LrSchedule::kConstant;
  if (name == "linear_decay") return LrSchedule::kLinearDecay;
  fail(ErrorKind::kInvalidArgument, "unknown schedule '" + name + "' (expected constant|linear_decay)",
       "optimizer.schedule");
}

std::string to_string(LrSchedule schedule) {
  return schedule == LrSchedule::kConstant ? "constant" : "linear_decay";
}

double scheduled_lr(const OptimizerConfig& config, double base_lr, std::uint64_t step, std::uint64_t total_steps) {
  double lr = base_lr;
  if (config.warmup_steps > 0 && step < config.warmup_steps) {
    lr *= static_cast<double>(step + 1) / static_cast<double>(config.warmup_steps);
  }
  if (config.schedule == LrSchedule::kLinearDecay && total_steps > 0) {
    const double progress = static_cast<double>(step) / static_cast<double>(total_steps);
    lr *= std::max(0.0, 1.0 - progress);
  }
  return lr;
}

void optimizer_step(ParameterStore& store, const OptimizerConfig& config, double lr) {
  double sq_norm = 0.0;
  for (const auto& [name, p] : store) {
    for (double g : p.grad.values()) {
      if (!std::isfinite(g)) fail(ErrorKind::kNumeric, "non-finite gradient in parameter " + name, name);
      sq_norm += g * g;
    }
  }
  double clip = 1.0;
  if (config.clip_norm > 0.0) {
    const double norm = std::sqrt(sq_norm);
    if (norm > config.clip_norm) clip = config.clip_norm / norm;
  }
  const std::uint64_t t = store.step() + 1;
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(t));
  for (auto& [name, p] : store) {
    auto values = p.value.values();
    auto grads = p.grad.values();
    if (config.kind == OptimizerKind::kSgd) {
      for (std::size_t i = 0; i < values.size(); ++i) values[i] -= lr * clip * grads[i];
      continue;
    }
    auto& slots = store.slots()[name];
    if (slots.first_moment.empty()) {
      slots.first_moment = Tensor(p.value.shape(), 0.0);
      slots.second_moment = Tensor(p.value.shape(), 0.0);
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double g = grads[i] * clip;
      double& m = slots.first_moment[i];
      double& v = slots.second_moment[i];
      m = config.beta1 * m + (1.0 - config.beta1) * g;
      v = config.beta2 * v + (1.0 - config.beta2) * g * g;
      values[i] -= lr * (m / bc1) / (std::sqrt(v / bc2) + config.eps);
    }
  }
  store.zero_grad();
  store.set_step(t);
}

}  // namespace sacti::ad
